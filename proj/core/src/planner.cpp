#include "netorch/planner.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "field_reader.hpp"
#include "netorch/errors.hpp"
#include "netorch/llmgw.hpp"
#include "netorch/selector.hpp"

namespace netorch {

SlotType slot_type_of(const SlotValue& value) {
  switch (value.index()) {
    case 0: return SlotType::kNumber;
    case 1: return SlotType::kNumberList;
    case 2: return SlotType::kMatrix;
    default: return SlotType::kString;
  }
}

Json slot_value_to_json(const SlotValue& value) {
  return std::visit([](const auto& v) { return Json(v); }, value);
}

SlotValue slot_value_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    std::vector<double> values;
    values.reserve(j.size());
    for (const Json& v : j) {
      if (!v.is_number()) {
        throw Error(ErrorCode::kEnvelopeParseError,
                    "slot list values must all be numbers");
      }
      values.push_back(v.get<double>());
    }
    return values;
  }
  if (j.is_object()) return matrix_from_json(j);
  throw Error(ErrorCode::kEnvelopeParseError,
              "slot value must be a number, number list, matrix or string");
}

Json Plan::to_json() const {
  Json tasks_json = Json::array();
  for (const TaskSpec& task : tasks) {
    Json slots_json = Json::array();
    for (const Slot& slot : task.slots) {
      slots_json.push_back({{"name", slot.name}, {"value", slot_value_to_json(slot.value)}});
    }
    tasks_json.push_back({
        {"task_id", task.task_id},
        {"task_type", to_string(task.task_type)},
        {"objective", to_string(task.objective)},
        {"slots", slots_json},
        {"depends_on", task.depends_on},
    });
  }
  return Json{{"query_text", query_text}, {"tasks", tasks_json}};
}

Plan Plan::from_json(const Json& j) {
  FieldReader top(j, "plan", ErrorCode::kEnvelopeParseError);
  Plan plan;
  plan.query_text =
      require_string(top.get("query_text"), "plan.query_text", ErrorCode::kEnvelopeParseError);
  const Json& tasks = top.get("tasks");
  top.reject_unknown();
  if (!tasks.is_array()) {
    throw Error(ErrorCode::kEnvelopeParseError, "plan.tasks must be an array");
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string context = "plan.tasks[" + std::to_string(i) + "]";
    FieldReader t(tasks[i], context, ErrorCode::kEnvelopeParseError);
    TaskSpec task;
    const Json& id = t.get("task_id");
    if (!id.is_number_integer() || id.get<int64_t>() != static_cast<int64_t>(i)) {
      throw Error(ErrorCode::kEnvelopeParseError, context + ".task_id must equal " +
                                                      std::to_string(i));
    }
    task.task_id = static_cast<int>(i);
    try {
      task.task_type = task_type_from_string(
          require_string(t.get("task_type"), context + ".task_type",
                         ErrorCode::kEnvelopeParseError));
      task.objective = objective_from_string(require_string(
          t.get("objective"), context + ".objective", ErrorCode::kEnvelopeParseError));
    } catch (const Error& e) {
      throw Error(ErrorCode::kEnvelopeParseError, context + ": " + e.what());
    }
    const Json& slots = t.get("slots");
    if (!slots.is_array()) {
      throw Error(ErrorCode::kEnvelopeParseError, context + ".slots must be an array");
    }
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const std::string slot_context = context + ".slots[" + std::to_string(s) + "]";
      FieldReader sr(slots[s], slot_context, ErrorCode::kEnvelopeParseError);
      Slot slot;
      slot.name = require_string(sr.get("name"), slot_context + ".name",
                                 ErrorCode::kEnvelopeParseError);
      slot.value = slot_value_from_json(sr.get("value"));
      sr.reject_unknown();
      task.slots.push_back(std::move(slot));
    }
    const Json& deps = t.get("depends_on");
    t.reject_unknown();
    if (!deps.is_array()) {
      throw Error(ErrorCode::kEnvelopeParseError, context + ".depends_on must be an array");
    }
    for (const Json& d : deps) {
      if (!d.is_number_integer()) {
        throw Error(ErrorCode::kEnvelopeParseError,
                    context + ".depends_on entries must be integers");
      }
      task.depends_on.push_back(d.get<int>());
    }
    plan.tasks.push_back(std::move(task));
  }
  return plan;
}

namespace {

// Slots each task type can carry. The planner only attaches a value --
// from the query or the payload -- when the task type declares the name
// with a matching type, so plans stay exactly as wide as their task needs.
const std::vector<SlotSpec>& task_input_slots(TaskType t) {
  static const std::vector<SlotSpec> bandwidth = {
      {"total_bw", SlotType::kNumber},
      {"gains", SlotType::kNumberList},
  };
  static const std::vector<SlotSpec> power = {
      {"signal_gain", SlotType::kMatrix},
      {"cross_gain", SlotType::kMatrix},
      {"noise", SlotType::kNumber},
      {"p_max", SlotType::kNumber},
      {"gains", SlotType::kNumberList},
      {"total_power", SlotType::kNumber},
  };
  static const std::vector<SlotSpec> none;
  switch (t) {
    case TaskType::kBandwidthAllocation: return bandwidth;
    case TaskType::kPowerAllocation: return power;
    default: return none;
  }
}

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool contains(const std::string& haystack, std::string_view needle) {
  return haystack.find(needle) != std::string::npos;
}

std::optional<TaskType> detect_task(const std::string& text) {
  if (contains(text, "bandwidth")) return TaskType::kBandwidthAllocation;
  if (contains(text, "power")) return TaskType::kPowerAllocation;
  if (contains(text, "sinr")) return TaskType::kPowerAllocation;
  if (contains(text, "channel estimat")) return TaskType::kChannelEstimation;
  if (contains(text, "beam")) return TaskType::kBeamPrediction;
  return std::nullopt;
}

// Ordered keyword rules; first hit wins. The power case treats
// "proportional" as the product-of-SINRs objective only when "sinr" is
// mentioned; otherwise the phrase keeps its literal meaning and selection
// falls back to description similarity.
Objective detect_objective(TaskType task, const std::string& text) {
  const bool power = task == TaskType::kPowerAllocation;
  if (power && contains(text, "sinr") &&
      (contains(text, "product") || contains(text, "proportional"))) {
    return Objective::kMaxProdSinr;
  }
  if (contains(text, "proportional fairness") || contains(text, "proportionally fair")) {
    return Objective::kProportionalFairness;
  }
  if (power && (contains(text, "max-min") || contains(text, "max min") ||
                contains(text, "maxmin") || contains(text, "minimum sinr") ||
                contains(text, "worst"))) {
    return Objective::kMaxMinSinr;
  }
  if (power && contains(text, "water")) return Objective::kWaterFilling;
  if (task == TaskType::kBandwidthAllocation && contains(text, "equal")) {
    return Objective::kEqualSplit;
  }
  if (power && (contains(text, "uniform") || contains(text, "equal"))) {
    return Objective::kUniformPower;
  }
  switch (task) {
    case TaskType::kBandwidthAllocation: return Objective::kProportionalFairness;
    case TaskType::kPowerAllocation: return Objective::kMaxMinSinr;
    default: return Objective::kNone;
  }
}

struct Clause {
  TaskType task;
  std::string text;
};

std::vector<Clause> split_clauses(const std::string& lowered) {
  std::vector<std::string> fragments;
  std::size_t pos = 0;
  while (true) {
    const std::size_t split = lowered.find(" and ", pos);
    if (split == std::string::npos) {
      fragments.push_back(lowered.substr(pos));
      break;
    }
    fragments.push_back(lowered.substr(pos, split - pos));
    pos = split + 5;
  }

  std::vector<Clause> clauses;
  std::string pending;  // keyword-less lead-in attaches to the next clause
  for (const std::string& fragment : fragments) {
    if (auto task = detect_task(fragment)) {
      clauses.push_back({*task, pending + fragment});
      pending.clear();
    } else if (!clauses.empty()) {
      clauses.back().text += " and " + fragment;
    } else {
      pending += fragment + " and ";
    }
  }
  return clauses;
}

Plan plan_query_mock(const std::string& query, const std::optional<Json>& payload) {
  const std::string lowered = ascii_lower(query);
  const std::vector<Clause> clauses = split_clauses(lowered);
  if (clauses.empty()) {
    throw Error(ErrorCode::kUnrecognizedIntent,
                "no bandwidth/power/channel/beam request found in query");
  }

  const std::map<std::string, double> labeled = extract_labeled_numbers(query);

  // Payload fields become candidate slot values; entries that are not
  // representable as slot values are simply not candidates.
  std::map<std::string, SlotValue> candidates;
  if (payload) {
    if (!payload->is_object()) {
      throw Error(ErrorCode::kUnrecognizedIntent, "payload must be a JSON object");
    }
    for (auto it = payload->begin(); it != payload->end(); ++it) {
      try {
        candidates.emplace(it.key(), slot_value_from_json(it.value()));
      } catch (const Error&) {
        // not slot-shaped; skip
      }
    }
  }
  // Numbers written in the query win over payload fields of the same name.
  if (auto it = labeled.find("total_bw"); it != labeled.end()) {
    candidates.insert_or_assign("total_bw", it->second);
  }

  Plan plan;
  plan.query_text = query;
  for (const Clause& clause : clauses) {
    TaskSpec task;
    task.task_id = static_cast<int>(plan.tasks.size());
    task.task_type = clause.task;
    task.objective = detect_objective(clause.task, clause.text);
    for (const SlotSpec& spec : task_input_slots(clause.task)) {
      auto it = candidates.find(spec.name);
      if (it != candidates.end() && slot_type_of(it->second) == spec.type) {
        task.slots.push_back({spec.name, it->second});
      }
    }
    plan.tasks.push_back(std::move(task));
  }
  return plan;
}

}  // namespace

std::map<std::string, double> extract_labeled_numbers(const std::string& query) {
  static const std::regex total_bw_re(R"((\d+(?:\.\d+)?)\s*bandwidth\s+units)",
                                      std::regex::icase);
  static const std::regex users_re(R"((\d+(?:\.\d+)?)\s*users?\b)", std::regex::icase);
  static const std::regex cells_re(R"((\d+(?:\.\d+)?)\s*cells?\b)", std::regex::icase);

  std::map<std::string, double> out;
  std::smatch m;
  if (std::regex_search(query, m, total_bw_re)) out["total_bw"] = std::stod(m[1]);
  if (std::regex_search(query, m, users_re)) out["num_users"] = std::stod(m[1]);
  if (std::regex_search(query, m, cells_re)) out["num_cells"] = std::stod(m[1]);
  return out;
}

Plan plan_query(const std::string& query, const std::optional<Json>& payload,
                const PlannerOptions& options) {
  if (query.empty()) {
    throw Error(ErrorCode::kUnrecognizedIntent, "query is empty");
  }
  if (options.backend == PlannerBackend::kMock) {
    return plan_query_mock(query, payload);
  }
  if (options.gateway == nullptr || options.registry == nullptr) {
    throw Error(ErrorCode::kBackendError,
                "llm backend needs a gateway config and a registry");
  }
  try {
    return plan_with_llm(*options.gateway, query, payload, *options.registry,
                         options.transport);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kTransportError:
      case ErrorCode::kProtocolError:
      case ErrorCode::kAuthError:
        throw Error(ErrorCode::kBackendError, e.what());
      default:
        throw;
    }
  }
}

std::string to_string(const Violation& v) {
  std::string kind;
  switch (v.kind) {
    case Violation::Kind::kNoModelForTask: kind = "NoModelForTask"; break;
    case Violation::Kind::kMissingSlot: kind = "MissingSlot"; break;
    case Violation::Kind::kDanglingDependency: kind = "DanglingDependency"; break;
  }
  return kind + "(task " + std::to_string(v.task_id) + ": " + v.detail + ")";
}

std::vector<Violation> validate_plan(const Plan& plan, const Registry& registry) {
  std::vector<Violation> violations;
  // Which model each task would resolve to; nullptr while unresolvable.
  std::vector<const ModelDescriptor*> selected(plan.tasks.size(), nullptr);

  for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
    const TaskSpec& task = plan.tasks[i];
    const int id = task.task_id;

    for (int dep : task.depends_on) {
      if (dep < 0 || dep >= static_cast<int>(i)) {
        violations.push_back({Violation::Kind::kDanglingDependency, id,
                              "depends on task " + std::to_string(dep)});
      }
    }

    const auto ranked =
        registry.list_models(task.task_type).empty()
            ? std::vector<RankedCandidate>{}
            : rank_models(registry, task.task_type, task.objective, plan.query_text, 1);
    if (ranked.empty()) {
      violations.push_back({Violation::Kind::kNoModelForTask, id,
                            "no registered model for task_type '" +
                                std::string(to_string(task.task_type)) + "'"});
      continue;
    }
    selected[i] = registry.find(ranked.front().model_id);

    std::set<std::string> available;
    for (const Slot& slot : task.slots) available.insert(slot.name);
    for (int dep : task.depends_on) {
      if (dep >= 0 && dep < static_cast<int>(i) && selected[dep] != nullptr) {
        for (const std::string& field : selected[dep]->output_schema) {
          available.insert(field);
        }
      }
    }
    for (const SlotSpec& required : selected[i]->input_schema) {
      if (!available.contains(required.name)) {
        violations.push_back({Violation::Kind::kMissingSlot, id,
                              "slot '" + required.name + "' required by model '" +
                                  selected[i]->model_id + "'"});
      }
    }
  }
  return violations;
}

}  // namespace netorch
