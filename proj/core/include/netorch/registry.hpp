#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netorch/canonical.hpp"

namespace netorch {

enum class TaskType {
  kBandwidthAllocation,
  kPowerAllocation,
  kChannelEstimation,
  kBeamPrediction,
  kBaseline,
};

enum class Objective {
  kProportionalFairness,
  kMaxMinSinr,
  kMaxProdSinr,
  kEqualSplit,
  kUniformPower,
  kWaterFilling,
  kNone,
};

enum class ModelSource { kAnalytical, kLearned };

// Semantic type of a planner slot / tool-call argument.
enum class SlotType { kNumber, kNumberList, kMatrix, kString };

std::string_view to_string(TaskType t);
std::string_view to_string(Objective o);
std::string_view to_string(ModelSource s);
std::string_view to_string(SlotType t);
TaskType task_type_from_string(std::string_view s);
Objective objective_from_string(std::string_view s);
ModelSource model_source_from_string(std::string_view s);
SlotType slot_type_from_string(std::string_view s);

struct SlotSpec {
  std::string name;
  SlotType type = SlotType::kNumber;

  bool operator==(const SlotSpec&) const = default;
};

// One registry entry: what a model does (task_type/objective), the prose
// the selector ranks against, and the I/O schema the executor enforces.
struct ModelDescriptor {
  std::string model_id;
  TaskType task_type = TaskType::kBaseline;
  Objective objective = Objective::kNone;
  std::string description;
  std::vector<SlotSpec> input_schema;
  std::vector<std::string> output_schema;
  uint64_t download_count = 0;
  ModelSource source = ModelSource::kAnalytical;

  bool operator==(const ModelDescriptor&) const = default;
};

class Registry {
 public:
  // Raises DuplicateModelId / InvalidDescriptor (empty id, description or
  // schema slot names, duplicate slot names).
  const std::string& register_model(ModelDescriptor descriptor);

  const ModelDescriptor* find(const std::string& model_id) const;
  std::size_t size() const { return models_.size(); }

  // Ascending by model_id; optionally filtered by task type.
  std::vector<const ModelDescriptor*> list_models(
      std::optional<TaskType> task_type = std::nullopt) const;

  bool operator==(const Registry&) const = default;

  Json to_json() const;
  static Registry from_json(const Json& j);

 private:
  std::map<std::string, ModelDescriptor> models_;
};

// File format: {"version": 1, "models": [...]} with exactly the
// ModelDescriptor field names; unknown fields are rejected.
Registry load_registry(const std::string& path);
void save_registry(const Registry& registry, const std::string& path);

// The six built-in solver descriptors (the shipped registry file is this
// registry serialized).
Registry default_registry();

}  // namespace netorch
