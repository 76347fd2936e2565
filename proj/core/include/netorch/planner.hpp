#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netorch/canonical.hpp"
#include "netorch/registry.hpp"

namespace netorch {

using SlotValue = std::variant<double, std::vector<double>, Matrix, std::string>;

SlotType slot_type_of(const SlotValue& value);
Json slot_value_to_json(const SlotValue& value);
// Shape-dispatched: number, array of numbers, {rows,cols,data} object, or
// string. Raises EnvelopeParseError for anything else.
SlotValue slot_value_from_json(const Json& j);

struct Slot {
  std::string name;
  SlotValue value;

  bool operator==(const Slot&) const = default;
};

struct TaskSpec {
  int task_id = 0;
  TaskType task_type = TaskType::kBaseline;
  Objective objective = Objective::kNone;
  std::vector<Slot> slots;
  std::vector<int> depends_on;

  bool operator==(const TaskSpec&) const = default;
};

struct Plan {
  std::string query_text;
  std::vector<TaskSpec> tasks;

  bool operator==(const Plan&) const = default;

  Json to_json() const;
  static Plan from_json(const Json& j);
};

enum class PlannerBackend { kMock, kLlm };

struct GatewayConfig;  // llmgw.hpp
class Transport;       // llmgw.hpp

struct PlannerOptions {
  PlannerBackend backend = PlannerBackend::kMock;
  // Required for the llm backend; ignored by mock.
  const GatewayConfig* gateway = nullptr;
  const Registry* registry = nullptr;
  Transport* transport = nullptr;
};

// Labeled numbers the mock grammar understands: "<n> bandwidth units",
// "<n> users", "<n> cells". Returned under those keys ("total_bw",
// "num_users", "num_cells"); only slots a task type declares are attached
// to a task.
std::map<std::string, double> extract_labeled_numbers(const std::string& query);

// Decomposes the query. The mock backend is a deterministic keyword
// grammar: clauses split on " and "; task type from the first of
// {bandwidth, power, sinr -> power, channel estimat*, beam}; objective
// from ordered keyword rules (documented in the implementation); slots
// from labeled numbers and payload fields matched to the task type's
// declared inputs. Raises UnrecognizedIntent when no clause yields a task,
// BackendError/gateway errors for backend=llm.
Plan plan_query(const std::string& query, const std::optional<Json>& payload,
                const PlannerOptions& options = {});

struct Violation {
  enum class Kind { kNoModelForTask, kMissingSlot, kDanglingDependency };
  Kind kind;
  int task_id = 0;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

std::string to_string(const Violation& v);

// Checks the plan against what execution will actually do: every task
// must have a rankable model, its required slots present (own slots plus
// dependency outputs), and dependencies must point at earlier tasks.
std::vector<Violation> validate_plan(const Plan& plan, const Registry& registry);

}  // namespace netorch
