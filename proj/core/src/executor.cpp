#include "netorch/executor.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <set>

#include "field_reader.hpp"
#include "netorch/errors.hpp"
#include "netorch/solvers.hpp"

namespace netorch {

namespace {

Json require_object(const Json& j, const std::string& what) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kEnvelopeParseError, what + " must be a JSON object");
  }
  return j;
}

}  // namespace

std::string encode_tool_call(const ToolCall& call) {
  return canonical_dump(Json{
      {"call_id", call.call_id},
      {"tool", call.tool},
      {"arguments", call.arguments},
  });
}

ToolCall decode_tool_call(const std::string& bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kEnvelopeParseError, std::string("tool call: ") + e.what());
  }
  FieldReader reader(j, "tool call", ErrorCode::kEnvelopeParseError);
  ToolCall call;
  call.call_id =
      require_string(reader.get("call_id"), "tool call 'call_id'", ErrorCode::kEnvelopeParseError);
  call.tool = require_string(reader.get("tool"), "tool call 'tool'",
                             ErrorCode::kEnvelopeParseError);
  call.arguments = require_object(reader.get("arguments"), "tool call 'arguments'");
  reader.reject_unknown();
  return call;
}

std::string encode_tool_result(const ToolResult& result) {
  Json j{
      {"call_id", result.call_id},
      {"status", result.status == ToolResult::Status::kOk ? "ok" : "error"},
      {"output", result.output},
  };
  if (result.status == ToolResult::Status::kError) {
    j["error_message"] = result.error_message;
  }
  return canonical_dump(j);
}

ToolResult decode_tool_result(const std::string& bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kEnvelopeParseError, std::string("tool result: ") + e.what());
  }
  FieldReader reader(j, "tool result", ErrorCode::kEnvelopeParseError);
  ToolResult result;
  result.call_id = require_string(reader.get("call_id"), "tool result 'call_id'",
                                  ErrorCode::kEnvelopeParseError);
  const std::string status = require_string(reader.get("status"), "tool result 'status'",
                                            ErrorCode::kEnvelopeParseError);
  if (status == "ok") {
    result.status = ToolResult::Status::kOk;
  } else if (status == "error") {
    result.status = ToolResult::Status::kError;
  } else {
    throw Error(ErrorCode::kEnvelopeParseError, "tool result 'status' must be ok|error");
  }
  result.output = require_object(reader.get("output"), "tool result 'output'");
  if (result.status == ToolResult::Status::kError) {
    result.error_message = require_string(reader.get("error_message"),
                                          "tool result 'error_message'",
                                          ErrorCode::kEnvelopeParseError);
    if (result.error_message.empty()) {
      throw Error(ErrorCode::kEnvelopeParseError,
                  "tool result 'error_message' must be non-empty on error");
    }
  }
  reader.reject_unknown();
  return result;
}

namespace {

double arg_number(const Json& args, const char* name) {
  auto it = args.find(name);
  if (it == args.end() || !it->is_number()) {
    throw Error(ErrorCode::kEnvelopeParseError,
                std::string("argument '") + name + "' must be a number");
  }
  return it->get<double>();
}

std::vector<double> arg_number_list(const Json& args, const char* name) {
  auto it = args.find(name);
  if (it == args.end() || !it->is_array()) {
    throw Error(ErrorCode::kEnvelopeParseError,
                std::string("argument '") + name + "' must be a number list");
  }
  std::vector<double> out;
  out.reserve(it->size());
  for (const Json& v : *it) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kEnvelopeParseError,
                  std::string("argument '") + name + "' must contain only numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Matrix arg_matrix(const Json& args, const char* name) {
  auto it = args.find(name);
  if (it == args.end()) {
    throw Error(ErrorCode::kEnvelopeParseError,
                std::string("argument '") + name + "' must be a matrix");
  }
  return matrix_from_json(*it);
}

double geometric_mean(const std::vector<double>& xs) {
  double log_sum = 0.0;
  for (double x : xs) log_sum += std::log(x);
  return std::exp(log_sum / static_cast<double>(xs.size()));
}

PowerProblem power_problem_from_args(const Json& args) {
  PowerProblem problem;
  problem.signal_gain = arg_matrix(args, "signal_gain");
  problem.cross_gain = arg_matrix(args, "cross_gain");
  problem.noise = arg_number(args, "noise");
  problem.p_max = arg_number(args, "p_max");
  problem.num_cells = problem.signal_gain.rows;
  problem.num_ues = problem.signal_gain.cols;
  return problem;
}

Json bandwidth_output(const BandwidthProblem& problem, const Allocation& alloc) {
  std::vector<double> rates(alloc.values.size());
  for (std::size_t k = 0; k < alloc.values.size(); ++k) {
    rates[k] = alloc.values[k] *
               std::log2(1.0 + problem.effective_snr[k] / alloc.values[k]);
  }
  return Json{
      {"allocation", alloc.values},
      {"rates", rates},
      {"utility", alloc.objective_value},
      {"jain", jain_index(rates)},
  };
}

Json power_output(const PowerProblem& problem, const Allocation& alloc) {
  const Matrix p = as_power_matrix(problem, alloc.values);
  const std::vector<double> sinrs = sinr_all(problem, p);
  Matrix sinr_matrix(problem.num_cells, problem.num_ues);
  sinr_matrix.data = sinrs;
  return Json{
      {"allocation", Json(p)},
      {"sinrs", Json(sinr_matrix)},
      {"min_sinr", *std::min_element(sinrs.begin(), sinrs.end())},
      {"geomean_sinr", geometric_mean(sinrs)},
      {"jain", jain_index(sinrs)},
  };
}

// Binds a registry descriptor to its solver and runs it. Results carry
// exactly the fields the descriptor's output_schema advertises.
Json dispatch(const ModelDescriptor& model, const Json& args) {
  switch (model.objective) {
    case Objective::kProportionalFairness: {
      BandwidthProblem problem{arg_number(args, "total_bw"),
                               arg_number_list(args, "gains")};
      return bandwidth_output(problem, solve_bandwidth_pf(problem));
    }
    case Objective::kEqualSplit: {
      BandwidthProblem problem{arg_number(args, "total_bw"),
                               arg_number_list(args, "gains")};
      return bandwidth_output(problem, solve_bandwidth_equal(problem));
    }
    case Objective::kMaxMinSinr: {
      const PowerProblem problem = power_problem_from_args(args);
      const Allocation alloc = solve_power_maxmin(problem);
      Json out = power_output(problem, alloc);
      out["target"] = alloc.diagnostics.at("target");
      return out;
    }
    case Objective::kMaxProdSinr: {
      const PowerProblem problem = power_problem_from_args(args);
      const Allocation alloc = solve_power_maxprod(problem);
      Json out = power_output(problem, alloc);
      out["log_product"] = alloc.objective_value;
      return out;
    }
    case Objective::kUniformPower: {
      const PowerProblem problem = power_problem_from_args(args);
      return power_output(problem, solve_power_uniform(problem));
    }
    case Objective::kWaterFilling: {
      const Allocation alloc =
          solve_waterfilling(arg_number_list(args, "gains"), arg_number(args, "noise"),
                             arg_number(args, "total_power"));
      return Json{{"allocation", alloc.values},
                  {"water_level", alloc.diagnostics.at("water_level")}};
    }
    default:
      throw Error(ErrorCode::kNoModelForTask,
                  "model '" + model.model_id + "' has no bound solver");
  }
}

// Solver diagnostics worth keeping in the trace metrics.
std::map<std::string, double> dispatch_diagnostics(const ModelDescriptor& model,
                                                   const Json& output) {
  std::map<std::string, double> diags;
  for (const char* key : {"utility", "jain", "min_sinr", "geomean_sinr", "target",
                          "log_product", "water_level"}) {
    auto it = output.find(key);
    if (it != output.end() && it->is_number()) diags[key] = it->get<double>();
  }
  (void)model;
  return diags;
}

}  // namespace

ExecutionTrace execute_plan(const Plan& plan, const Registry& registry) {
  const std::vector<Violation> violations = validate_plan(plan, registry);
  if (!violations.empty()) {
    std::string detail;
    for (const Violation& v : violations) {
      if (!detail.empty()) detail += "; ";
      detail += to_string(v);
    }
    throw Error(ErrorCode::kPlanInvalid, detail);
  }

  ExecutionTrace trace;
  trace.plan = plan;
  trace.calls.reserve(plan.tasks.size());

  for (std::size_t i = 0; i < plan.tasks.size(); ++i) {
    const TaskSpec& task = plan.tasks[i];
    const std::string prefix = "task" + std::to_string(task.task_id) + ".";

    const RankedCandidate selected =
        rank_models(registry, task.task_type, task.objective, plan.query_text, 1).front();
    const ModelDescriptor& model = *registry.find(selected.model_id);
    std::set<std::string> schema_names;
    for (const SlotSpec& spec : model.input_schema) schema_names.insert(spec.name);

    ToolCall call;
    call.call_id = "call_" + std::to_string(task.task_id);
    call.tool = model.model_id;
    for (const Slot& slot : task.slots) {
      if (schema_names.contains(slot.name)) {
        call.arguments[slot.name] = slot_value_to_json(slot.value);
      }
    }

    ToolResult result;
    result.call_id = call.call_id;
    std::string dependency_failure;
    for (int dep : task.depends_on) {
      const CallRecord& upstream = trace.calls[static_cast<std::size_t>(dep)];
      if (upstream.result.status != ToolResult::Status::kOk) {
        dependency_failure = "dependency task " + std::to_string(dep) + " failed";
        break;
      }
      for (auto it = upstream.result.output.begin(); it != upstream.result.output.end();
           ++it) {
        if (schema_names.contains(it.key()) && !call.arguments.contains(it.key())) {
          call.arguments[it.key()] = it.value();
        }
      }
    }

    const auto started = std::chrono::steady_clock::now();
    if (!dependency_failure.empty()) {
      result.status = ToolResult::Status::kError;
      result.error_message = dependency_failure;
    } else {
      try {
        result.output = dispatch(model, call.arguments);
        result.status = ToolResult::Status::kOk;
      } catch (const Error& e) {
        result.status = ToolResult::Status::kError;
        result.error_message = e.what();
      }
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  started)
            .count();

    trace.metrics[prefix + "wall_ms"] = wall_ms;
    if (result.status == ToolResult::Status::kOk) {
      for (const auto& [key, value] : dispatch_diagnostics(model, result.output)) {
        trace.metrics[prefix + key] = value;
      }
    }
    trace.calls.push_back({std::move(call), std::move(result), selected, wall_ms});
  }
  return trace;
}

Json ExecutionTrace::to_json() const {
  Json calls_json = Json::array();
  for (const CallRecord& record : calls) {
    Json call = Json::parse(encode_tool_call(record.call));
    Json result = Json::parse(encode_tool_result(record.result));
    calls_json.push_back({
        {"call", call},
        {"result", result},
        {"selected",
         {{"model_id", record.selected.model_id},
          {"score", record.selected.score},
          {"rank", record.selected.rank}}},
        {"wall_ms", record.wall_ms},
    });
  }
  return Json{{"plan", plan.to_json()}, {"calls", calls_json}, {"metrics", metrics}};
}

namespace {

// Fixed-precision decimal rendering for the human summary; std::to_chars
// is locale-free, so the template output is byte-stable across platforms.
std::string format_fixed(double x, int precision) {
  char buffer[64];
  auto [end, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), x, std::chars_format::fixed, precision);
  return std::string(buffer, end);
}

void render_output_field(std::string& text, const std::string& key, const Json& value) {
  if (value.is_number()) {
    text += "  " + key + ": " + format_fixed(value.get<double>(), 6) + "\n";
  } else if (value.is_array() && key == "allocation") {
    // The allocation is the answer the user asked for; give it a row per
    // entry instead of one long line.
    double sum = 0.0;
    for (const Json& v : value) sum += v.is_number() ? v.get<double>() : 0.0;
    text += "  allocation (" + std::to_string(value.size()) + " entries, sum " +
            format_fixed(sum, 6) + "):\n";
    std::size_t i = 0;
    for (const Json& v : value) {
      text += "    " + std::to_string(i++) + ": " +
              format_fixed(v.is_number() ? v.get<double>() : 0.0, 6) + "\n";
    }
  } else if (value.is_array()) {
    text += "  " + key + ":";
    for (const Json& v : value) {
      text += " " + format_fixed(v.is_number() ? v.get<double>() : 0.0, 4);
    }
    text += "\n";
  } else if (value.is_object() && value.contains("rows")) {
    const Matrix m = matrix_from_json(value);
    text += "  " + key + " (" + std::to_string(m.rows) + " x " + std::to_string(m.cols) +
            "):\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
      text += "    ";
      for (std::size_t c = 0; c < m.cols; ++c) {
        text += (c ? " " : "") + format_fixed(m(r, c), 4);
      }
      text += "\n";
    }
  } else {
    text += "  " + key + ": " + value.dump() + "\n";
  }
}

}  // namespace

ResponseDocument compose_response(const ExecutionTrace& trace) {
  ResponseDocument doc;
  doc.metrics = trace.metrics;
  doc.structured_results = Json::array();

  std::string& text = doc.summary_text;
  text += "Query: " + trace.plan.query_text + "\n";
  for (std::size_t i = 0; i < trace.calls.size(); ++i) {
    const CallRecord& record = trace.calls[i];
    const TaskSpec& task = trace.plan.tasks[i];
    text += "Task " + std::to_string(task.task_id) + " (" +
            std::string(to_string(task.task_type)) + "/" +
            std::string(to_string(task.objective)) + ") -> " + record.selected.model_id +
            " (similarity " + format_fixed(record.selected.score, 4) + ")\n";
    if (record.result.status == ToolResult::Status::kError) {
      text += "  status: ERROR: " + record.result.error_message + "\n";
    } else {
      for (auto it = record.result.output.begin(); it != record.result.output.end(); ++it) {
        render_output_field(text, it.key(), it.value());
      }
    }
    doc.structured_results.push_back(Json::parse(encode_tool_result(record.result)));
  }
  return doc;
}

Json ResponseDocument::to_json() const {
  return Json{
      {"summary_text", summary_text},
      {"structured_results", structured_results},
      {"metrics", metrics},
  };
}

}  // namespace netorch
