#include "netorch/registry.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "field_reader.hpp"

namespace netorch {

std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::kBandwidthAllocation: return "bandwidth_allocation";
    case TaskType::kPowerAllocation: return "power_allocation";
    case TaskType::kChannelEstimation: return "channel_estimation";
    case TaskType::kBeamPrediction: return "beam_prediction";
    case TaskType::kBaseline: return "baseline";
  }
  return "?";
}

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::kProportionalFairness: return "proportional_fairness";
    case Objective::kMaxMinSinr: return "max_min_sinr";
    case Objective::kMaxProdSinr: return "max_prod_sinr";
    case Objective::kEqualSplit: return "equal_split";
    case Objective::kUniformPower: return "uniform_power";
    case Objective::kWaterFilling: return "water_filling";
    case Objective::kNone: return "none";
  }
  return "?";
}

std::string_view to_string(ModelSource s) {
  return s == ModelSource::kAnalytical ? "analytical" : "learned";
}

std::string_view to_string(SlotType t) {
  switch (t) {
    case SlotType::kNumber: return "number";
    case SlotType::kNumberList: return "number_list";
    case SlotType::kMatrix: return "matrix";
    case SlotType::kString: return "string";
  }
  return "?";
}

namespace {

[[noreturn]] void bad_enum(std::string_view what, std::string_view value) {
  throw Error(ErrorCode::kParseError,
              "unknown " + std::string(what) + " '" + std::string(value) + "'");
}

}  // namespace

TaskType task_type_from_string(std::string_view s) {
  if (s == "bandwidth_allocation") return TaskType::kBandwidthAllocation;
  if (s == "power_allocation") return TaskType::kPowerAllocation;
  if (s == "channel_estimation") return TaskType::kChannelEstimation;
  if (s == "beam_prediction") return TaskType::kBeamPrediction;
  if (s == "baseline") return TaskType::kBaseline;
  bad_enum("task_type", s);
}

Objective objective_from_string(std::string_view s) {
  if (s == "proportional_fairness") return Objective::kProportionalFairness;
  if (s == "max_min_sinr") return Objective::kMaxMinSinr;
  if (s == "max_prod_sinr") return Objective::kMaxProdSinr;
  if (s == "equal_split") return Objective::kEqualSplit;
  if (s == "uniform_power") return Objective::kUniformPower;
  if (s == "water_filling") return Objective::kWaterFilling;
  if (s == "none") return Objective::kNone;
  bad_enum("objective", s);
}

ModelSource model_source_from_string(std::string_view s) {
  if (s == "analytical") return ModelSource::kAnalytical;
  if (s == "learned") return ModelSource::kLearned;
  bad_enum("source", s);
}

SlotType slot_type_from_string(std::string_view s) {
  if (s == "number") return SlotType::kNumber;
  if (s == "number_list") return SlotType::kNumberList;
  if (s == "matrix") return SlotType::kMatrix;
  if (s == "string") return SlotType::kString;
  bad_enum("slot type", s);
}

const std::string& Registry::register_model(ModelDescriptor descriptor) {
  if (descriptor.model_id.empty()) {
    throw Error(ErrorCode::kInvalidDescriptor, "model_id must be non-empty");
  }
  if (descriptor.description.empty()) {
    throw Error(ErrorCode::kInvalidDescriptor,
                "model '" + descriptor.model_id + "' has an empty description");
  }
  std::set<std::string> slot_names;
  for (const SlotSpec& slot : descriptor.input_schema) {
    if (slot.name.empty()) {
      throw Error(ErrorCode::kInvalidDescriptor,
                  "model '" + descriptor.model_id + "' has an empty slot name");
    }
    if (!slot_names.insert(slot.name).second) {
      throw Error(ErrorCode::kInvalidDescriptor,
                  "model '" + descriptor.model_id + "' repeats slot '" + slot.name + "'");
    }
  }
  if (models_.contains(descriptor.model_id)) {
    throw Error(ErrorCode::kDuplicateModelId, descriptor.model_id);
  }
  auto [it, _] = models_.emplace(descriptor.model_id, std::move(descriptor));
  return it->first;
}

const ModelDescriptor* Registry::find(const std::string& model_id) const {
  auto it = models_.find(model_id);
  return it == models_.end() ? nullptr : &it->second;
}

std::vector<const ModelDescriptor*> Registry::list_models(
    std::optional<TaskType> task_type) const {
  std::vector<const ModelDescriptor*> out;
  for (const auto& [id, descriptor] : models_) {
    if (!task_type || descriptor.task_type == *task_type) out.push_back(&descriptor);
  }
  return out;
}

Json Registry::to_json() const {
  Json models = Json::array();
  for (const auto& [id, d] : models_) {
    Json schema = Json::array();
    for (const SlotSpec& slot : d.input_schema) {
      schema.push_back({{"name", slot.name}, {"type", to_string(slot.type)}});
    }
    models.push_back({
        {"model_id", d.model_id},
        {"task_type", to_string(d.task_type)},
        {"objective", to_string(d.objective)},
        {"description", d.description},
        {"input_schema", schema},
        {"output_schema", d.output_schema},
        {"download_count", d.download_count},
        {"source", to_string(d.source)},
    });
  }
  return Json{{"version", 1}, {"models", models}};
}

Registry Registry::from_json(const Json& j) {
  FieldReader top(j, "registry");
  const Json& version = top.get("version");
  if (!version.is_number_integer() || version.get<int64_t>() != 1) {
    throw Error(ErrorCode::kParseError, "registry version must be 1");
  }
  const Json& models = top.get("models");
  top.reject_unknown();
  if (!models.is_array()) {
    throw Error(ErrorCode::kParseError, "registry 'models' must be an array");
  }

  Registry registry;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string context = "model[" + std::to_string(i) + "]";
    FieldReader m(models[i], context);
    ModelDescriptor d;
    d.model_id = require_string(m.get("model_id"), context + ".model_id");
    d.task_type = task_type_from_string(
        require_string(m.get("task_type"), context + ".task_type"));
    d.objective = objective_from_string(
        require_string(m.get("objective"), context + ".objective"));
    d.description = require_string(m.get("description"), context + ".description");

    const Json& schema = m.get("input_schema");
    if (!schema.is_array()) {
      throw Error(ErrorCode::kParseError, context + ".input_schema must be an array");
    }
    for (std::size_t s = 0; s < schema.size(); ++s) {
      const std::string slot_context = context + ".input_schema[" + std::to_string(s) + "]";
      FieldReader slot(schema[s], slot_context);
      SlotSpec spec;
      spec.name = require_string(slot.get("name"), slot_context + ".name");
      spec.type = slot_type_from_string(
          require_string(slot.get("type"), slot_context + ".type"));
      slot.reject_unknown();
      d.input_schema.push_back(std::move(spec));
    }

    const Json& outputs = m.get("output_schema");
    if (!outputs.is_array()) {
      throw Error(ErrorCode::kParseError, context + ".output_schema must be an array");
    }
    for (const Json& field : outputs) {
      d.output_schema.push_back(require_string(field, context + ".output_schema entry"));
    }

    const Json& downloads = m.get("download_count");
    if (!downloads.is_number_unsigned()) {
      throw Error(ErrorCode::kParseError,
                  context + ".download_count must be a non-negative integer");
    }
    d.download_count = downloads.get<uint64_t>();
    d.source = model_source_from_string(require_string(m.get("source"), context + ".source"));
    m.reject_unknown();

    try {
      registry.register_model(std::move(d));
    } catch (const Error& e) {
      // Duplicate ids and schema violations inside a file are parse errors
      // from the caller's point of view; keep the inner code in the text.
      throw Error(ErrorCode::kParseError, context + ": " + e.what());
    }
  }
  return registry;
}

Registry load_registry(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open registry file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoError, "cannot read registry file '" + path + "'");
  return Registry::from_json(parse_json(buffer.str(), "registry file '" + path + "'"));
}

void save_registry(const Registry& registry, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  // Pretty-printed (keys still sorted) so the shipped file diffs cleanly.
  out << registry.to_json().dump(2) << '\n';
  if (!out.flush()) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
}

Registry default_registry() {
  Registry r;
  const std::vector<SlotSpec> power_inputs = {
      {"signal_gain", SlotType::kMatrix},
      {"cross_gain", SlotType::kMatrix},
      {"noise", SlotType::kNumber},
      {"p_max", SlotType::kNumber},
  };
  r.register_model({
      .model_id = "pf_bandwidth_v1",
      .task_type = TaskType::kBandwidthAllocation,
      .objective = Objective::kProportionalFairness,
      .description =
          "Allocates a total bandwidth budget across user equipment to maximize "
          "proportional fairness of user rates given per-user channel gains. "
          "Solves the concave log-utility problem exactly.",
      .input_schema = {{"total_bw", SlotType::kNumber}, {"gains", SlotType::kNumberList}},
      .output_schema = {"allocation", "rates", "utility", "jain"},
      .download_count = 4210,
      .source = ModelSource::kAnalytical,
  });
  r.register_model({
      .model_id = "equal_bandwidth_v1",
      .task_type = TaskType::kBandwidthAllocation,
      .objective = Objective::kEqualSplit,
      .description =
          "Splits the total bandwidth budget equally among user equipment "
          "regardless of channel gains. Simple baseline for bandwidth allocation.",
      .input_schema = {{"total_bw", SlotType::kNumber}, {"gains", SlotType::kNumberList}},
      .output_schema = {"allocation", "rates", "utility", "jain"},
      .download_count = 1190,
      .source = ModelSource::kAnalytical,
  });
  r.register_model({
      .model_id = "maxmin_power_v1",
      .task_type = TaskType::kPowerAllocation,
      .objective = Objective::kMaxMinSinr,
      .description =
          "Optimizes downlink transmit powers in multi-cell massive MIMO to "
          "maximize the minimum SINR across all user equipment, protecting "
          "worst-channel users under per-base-station power budgets.",
      .input_schema = power_inputs,
      .output_schema = {"allocation", "sinrs", "min_sinr", "geomean_sinr", "jain", "target"},
      .download_count = 3875,
      .source = ModelSource::kAnalytical,
  });
  r.register_model({
      .model_id = "maxprod_power_v1",
      .task_type = TaskType::kPowerAllocation,
      .objective = Objective::kMaxProdSinr,
      .description =
          "Optimizes downlink transmit powers in multi-cell massive MIMO to "
          "maximize the product of SINRs across user equipment, trading the "
          "worst link for proportionally fair throughput under per-base-station "
          "power budgets.",
      .input_schema = power_inputs,
      .output_schema = {"allocation", "sinrs", "min_sinr", "geomean_sinr", "jain",
                        "log_product"},
      .download_count = 2940,
      .source = ModelSource::kAnalytical,
  });
  r.register_model({
      .model_id = "uniform_power_v1",
      .task_type = TaskType::kPowerAllocation,
      .objective = Objective::kUniformPower,
      .description =
          "Distributes each base station's power budget uniformly across its "
          "user equipment, ignoring channel gains and interference. Baseline "
          "for power allocation.",
      .input_schema = power_inputs,
      .output_schema = {"allocation", "sinrs", "min_sinr", "geomean_sinr", "jain"},
      .download_count = 1480,
      .source = ModelSource::kAnalytical,
  });
  r.register_model({
      .model_id = "waterfilling_v1",
      .task_type = TaskType::kPowerAllocation,
      .objective = Objective::kWaterFilling,
      .description =
          "Classic water-filling power allocation over parallel single-cell "
          "channels given per-channel gains, a noise level, and a total power "
          "budget. Ignores array gain and inter-cell interference.",
      .input_schema = {{"gains", SlotType::kNumberList},
                       {"noise", SlotType::kNumber},
                       {"total_power", SlotType::kNumber}},
      .output_schema = {"allocation", "water_level"},
      .download_count = 2605,
      .source = ModelSource::kAnalytical,
  });
  return r;
}

}  // namespace netorch
