#pragma once

#include <map>
#include <string>
#include <vector>

#include "netorch/canonical.hpp"
#include "netorch/planner.hpp"
#include "netorch/registry.hpp"
#include "netorch/selector.hpp"

namespace netorch {

// JSON function-calling envelope: the coordinator-to-model request.
struct ToolCall {
  std::string call_id;
  std::string tool;  // model_id
  Json arguments = Json::object();

  bool operator==(const ToolCall&) const = default;
};

struct ToolResult {
  enum class Status { kOk, kError };

  std::string call_id;
  Status status = Status::kOk;
  Json output = Json::object();
  std::string error_message;  // non-empty iff status == kError

  bool operator==(const ToolResult&) const = default;
};

struct CallRecord {
  ToolCall call;
  ToolResult result;
  RankedCandidate selected;
  double wall_ms = 0.0;  // the only nondeterministic field in a trace
};

struct ExecutionTrace {
  Plan plan;
  std::vector<CallRecord> calls;
  std::map<std::string, double> metrics;  // task<i>.<diagnostic>, task<i>.wall_ms

  Json to_json() const;
};

// Canonical envelope bytes: sorted keys, no whitespace, shortest
// round-trip numbers, matrices as {"rows","cols","data"}. decode is
// strict (exact field set, exact types) so decode(encode(x)) == x and
// encode is idempotent across the round trip.
std::string encode_tool_call(const ToolCall& call);
ToolCall decode_tool_call(const std::string& bytes);
std::string encode_tool_result(const ToolResult& result);
ToolResult decode_tool_result(const std::string& bytes);

// Runs every task in plan order: the selector picks the model, arguments
// come from the task's slots plus any dependency outputs whose field
// names match the model's input schema, and the bound solver runs.
// Per-task failures become status=error results; the trace always covers
// every task. Raises PlanInvalid when validate_plan reports violations.
ExecutionTrace execute_plan(const Plan& plan, const Registry& registry);

struct ResponseDocument {
  std::string summary_text;       // deterministic rendering, no timing
  Json structured_results;        // array echoing each raw ToolResult
  std::map<std::string, double> metrics;

  Json to_json() const;
};

ResponseDocument compose_response(const ExecutionTrace& trace);

}  // namespace netorch
