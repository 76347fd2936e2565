#include "netorch/llmgw.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>
#include <utility>

#include "httplib.h"

#include "field_reader.hpp"
#include "netorch/errors.hpp"
#include "netorch/rng.hpp"

namespace netorch {

namespace {

constexpr std::chrono::milliseconds kBackoffBase{500};
constexpr const char* kDefaultCompletionsPath = "/v1/chat/completions";

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  if (value != nullptr && *value != '\0') return value;
  return fallback;
}

}  // namespace

std::string_view to_string(ChatRole role) {
  switch (role) {
    case ChatRole::kSystem: return "system";
    case ChatRole::kUser: return "user";
    case ChatRole::kAssistant: return "assistant";
    case ChatRole::kTool: return "tool";
  }
  return "user";
}

GatewayConfig GatewayConfig::from_env(GatewayConfig defaults) {
  defaults.endpoint = env_or("NETORCH_LLM_ENDPOINT", std::move(defaults.endpoint));
  defaults.api_key = env_or("NETORCH_LLM_API_KEY", std::move(defaults.api_key));
  defaults.model = env_or("NETORCH_LLM_MODEL", std::move(defaults.model));
  return defaults;
}

std::string request_digest(std::string_view body) {
  uint64_t h = fnv1a64(body);
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
    h >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transports

HttpResponse HttpTransport::post(const GatewayConfig& config, const std::string& body) {
  const std::string& url = config.endpoint;
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) {
    throw Error(ErrorCode::kTransportError,
                "endpoint '" + url +
                    "' is not a plain-http URL; this build has no TLS, so point "
                    "it at a local runtime or proxy");
  }
  const std::size_t slash = url.find('/', kScheme.size());
  std::string base = slash == std::string::npos ? url : url.substr(0, slash);
  std::string path = slash == std::string::npos ? "" : url.substr(slash);
  if (path.empty() || path == "/") path = kDefaultCompletionsPath;

  httplib::Client client(base);
  const auto timeout = std::chrono::milliseconds(config.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (!config.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config.api_key);
  }
  auto res = client.Post(path, headers, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::kTransportError,
                "POST " + base + path + ": " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

ReplayTransport ReplayTransport::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open replay file '" + path + "'");
  }
  ReplayTransport transport;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context = path + ":" + std::to_string(line_no);
    const Json parsed = parse_json(line, context);
    FieldReader entry(parsed, context);
    const std::string digest = require_string(entry.get("digest"), context + ".digest");
    transport.responses_[digest] = canonical_dump(entry.get("response"));
    entry.reject_unknown();
  }
  return transport;
}

void ReplayTransport::add(const std::string& request_body, const Json& response) {
  responses_[request_digest(request_body)] = canonical_dump(response);
}

HttpResponse ReplayTransport::post(const GatewayConfig&, const std::string& body) {
  const std::string digest = request_digest(body);
  auto it = responses_.find(digest);
  if (it == responses_.end()) {
    // Deliberately not a TransportError: a missing entry means the script
    // does not cover this request, and retrying cannot fix that.
    throw Error(ErrorCode::kProtocolError,
                "replay script has no entry for request digest " + digest +
                    " (request starts: " + body.substr(0, 160) + ")");
  }
  return {200, it->second};
}

// ---------------------------------------------------------------------------
// Prompt and schema construction

std::string build_system_prompt(const Registry& registry) {
  std::string prompt =
      "You are a wireless-network resource-allocation coordinator. You have "
      "access to a repository of specialized optimization and prediction "
      "models, exposed to you as callable tools. Decompose each user request "
      "into sub-tasks, pick the single best model per sub-task, and invoke it "
      "with every argument filled from the request or its attached data. "
      "Never invent numeric values. Reply with tool calls only.\n\n";
  const auto models = registry.list_models();
  if (models.empty()) {
    prompt += "Model repository: no models are registered.\n";
    return prompt;
  }
  prompt += "Model repository (" + std::to_string(models.size()) + " models):\n";
  for (const ModelDescriptor* model : models) {
    prompt += "\n- " + model->model_id + " [" + std::string(to_string(model->task_type)) +
              " / " + std::string(to_string(model->objective)) + "]\n";
    prompt += "  " + model->description + "\n";
    prompt += "  inputs:";
    if (model->input_schema.empty()) prompt += " none";
    for (std::size_t i = 0; i < model->input_schema.size(); ++i) {
      const SlotSpec& slot = model->input_schema[i];
      prompt += std::string(i == 0 ? " " : ", ") + slot.name + " (" +
                std::string(to_string(slot.type)) + ")";
    }
    prompt += "\n";
  }
  return prompt;
}

namespace {

Json slot_parameter_schema(SlotType type) {
  switch (type) {
    case SlotType::kNumber:
      return Json{{"type", "number"}};
    case SlotType::kNumberList:
      return Json{{"items", Json{{"type", "number"}}}, {"type", "array"}};
    case SlotType::kMatrix:
      return Json{
          {"properties",
           Json{{"cols", Json{{"type", "integer"}}},
                {"data", Json{{"items", Json{{"type", "number"}}}, {"type", "array"}}},
                {"rows", Json{{"type", "integer"}}}}},
          {"required", Json::array({"rows", "cols", "data"})},
          {"type", "object"},
      };
    case SlotType::kString:
      return Json{{"type", "string"}};
  }
  return Json{{"type", "number"}};
}

Json message_to_json(const ChatMessage& message) {
  Json j{{"content", message.content}, {"role", std::string(to_string(message.role))}};
  if (!message.tool_calls.empty()) {
    Json calls = Json::array();
    for (const ToolCall& call : message.tool_calls) {
      calls.push_back(Json{
          {"function",
           Json{{"arguments", canonical_dump(call.arguments)}, {"name", call.tool}}},
          {"id", call.call_id},
          {"type", "function"},
      });
    }
    j["tool_calls"] = std::move(calls);
  }
  if (message.role == ChatRole::kTool) {
    j["tool_call_id"] = message.tool_call_id;
  }
  return j;
}

}  // namespace

Json tool_schemas_from_registry(const Registry& registry) {
  Json tools = Json::array();
  for (const ModelDescriptor* model : registry.list_models()) {
    Json properties = Json::object();
    Json required = Json::array();
    for (const SlotSpec& slot : model->input_schema) {
      properties[slot.name] = slot_parameter_schema(slot.type);
      required.push_back(slot.name);
    }
    tools.push_back(Json{
        {"function", Json{{"description", model->description},
                          {"name", model->model_id},
                          {"parameters", Json{{"additionalProperties", false},
                                              {"properties", std::move(properties)},
                                              {"required", std::move(required)},
                                              {"type", "object"}}}}},
        {"type", "function"},
    });
  }
  return tools;
}

std::string build_chat_request(const GatewayConfig& config,
                               const std::vector<ChatMessage>& messages,
                               const Json& tool_schemas) {
  Json request{{"messages", Json::array()}, {"model", config.model}};
  for (const ChatMessage& message : messages) {
    request["messages"].push_back(message_to_json(message));
  }
  if (tool_schemas.is_array() && !tool_schemas.empty()) {
    request["tool_choice"] = "auto";
    request["tools"] = tool_schemas;
  }
  return canonical_dump(request);
}

// ---------------------------------------------------------------------------
// Completion call with retry

namespace {

// Strict about the fields this client needs, tolerant of everything else:
// the service is external, so unknown fields are expected, not an error.
const Json& require_field(const Json& obj, const char* name, const std::string& context) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kProtocolError, context + " must be an object");
  }
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw Error(ErrorCode::kProtocolError, context + " is missing field '" + name + "'");
  }
  return *it;
}

ChatMessage parse_assistant_message(const std::string& body) {
  Json root;
  try {
    root = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kProtocolError,
                std::string("response body is not JSON: ") + e.what());
  }
  const Json& choices = require_field(root, "choices", "response");
  if (!choices.is_array() || choices.empty()) {
    throw Error(ErrorCode::kProtocolError,
                "response field 'choices' must be a non-empty array");
  }
  const Json& message = require_field(choices[0], "message", "response.choices[0]");

  ChatMessage out;
  out.role = ChatRole::kAssistant;
  if (auto it = message.find("content"); it != message.end() && it->is_string()) {
    out.content = it->get<std::string>();
  }
  auto calls = message.find("tool_calls");
  if (calls == message.end() || calls->is_null()) return out;
  if (!calls->is_array()) {
    throw Error(ErrorCode::kProtocolError, "message field 'tool_calls' must be an array");
  }
  for (std::size_t i = 0; i < calls->size(); ++i) {
    const std::string context = "tool_calls[" + std::to_string(i) + "]";
    const Json& entry = (*calls)[i];
    ToolCall call;
    call.call_id = require_string(require_field(entry, "id", context), context + ".id",
                                  ErrorCode::kProtocolError);
    const Json& function = require_field(entry, "function", context);
    call.tool = require_string(require_field(function, "name", context + ".function"),
                               context + ".function.name", ErrorCode::kProtocolError);
    const std::string arguments =
        require_string(require_field(function, "arguments", context + ".function"),
                       context + ".function.arguments", ErrorCode::kProtocolError);
    try {
      call.arguments = Json::parse(arguments);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kProtocolError,
                  context + ".function.arguments is not valid JSON: " + e.what());
    }
    if (!call.arguments.is_object()) {
      throw Error(ErrorCode::kProtocolError,
                  context + ".function.arguments must encode a JSON object");
    }
    out.tool_calls.push_back(std::move(call));
  }
  return out;
}

}  // namespace

ChatMessage chat_complete(const GatewayConfig& config,
                          const std::vector<ChatMessage>& messages,
                          const Json& tool_schemas, Transport* transport,
                          const Sleeper& sleeper) {
  if (config.timeout_ms <= 0) {
    throw Error(ErrorCode::kParseError, "gateway timeout_ms must be positive");
  }
  if (config.max_retries < 0) {
    throw Error(ErrorCode::kParseError, "gateway max_retries must be >= 0");
  }
  if (messages.empty() || messages.front().role != ChatRole::kSystem) {
    throw Error(ErrorCode::kParseError, "chat must start with a system message");
  }

  static HttpTransport default_transport;
  Transport& wire = transport != nullptr ? *transport : default_transport;
  Sleeper sleep_for = sleeper;
  if (!sleep_for) {
    sleep_for = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }

  const std::string body = build_chat_request(config, messages, tool_schemas);

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) sleep_for(kBackoffBase * (1 << (attempt - 1)));
    HttpResponse response;
    try {
      response = wire.post(config, body);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransportError) throw;
      last_failure = e.what();
      continue;
    }
    if (response.status == 401 || response.status == 403) {
      throw Error(ErrorCode::kAuthError, "gateway rejected credentials (HTTP " +
                                             std::to_string(response.status) + ")");
    }
    if (response.status >= 500) {
      last_failure = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status != 200) {
      throw Error(ErrorCode::kProtocolError,
                  "unexpected HTTP " + std::to_string(response.status) + ": " +
                      response.body.substr(0, 200));
    }
    return parse_assistant_message(response.body);
  }
  throw Error(ErrorCode::kTransportError,
              "gateway unreachable after " + std::to_string(config.max_retries + 1) +
                  " attempts (last failure: " + last_failure + ")");
}

// ---------------------------------------------------------------------------
// LLM-backed planning

Plan plan_with_llm(const GatewayConfig& config, const std::string& query,
                   const std::optional<Json>& payload, const Registry& registry,
                   Transport* transport) {
  std::string user_text = query;
  if (payload.has_value()) {
    user_text += "\n\nAttached data (JSON):\n" + canonical_dump(*payload);
  }
  const std::vector<ChatMessage> messages = {
      {.role = ChatRole::kSystem, .content = build_system_prompt(registry)},
      {.role = ChatRole::kUser, .content = std::move(user_text)},
  };
  const ChatMessage reply =
      chat_complete(config, messages, tool_schemas_from_registry(registry), transport);
  if (reply.tool_calls.empty()) {
    throw Error(ErrorCode::kUnrecognizedIntent,
                "assistant returned no tool calls" +
                    (reply.content.empty() ? std::string()
                                           : ": " + reply.content.substr(0, 200)));
  }

  Plan plan;
  plan.query_text = query;
  std::vector<Violation> violations;
  for (std::size_t i = 0; i < reply.tool_calls.size(); ++i) {
    const ToolCall& call = reply.tool_calls[i];
    TaskSpec task;
    task.task_id = static_cast<int>(i);
    const ModelDescriptor* model = registry.find(call.tool);
    if (model == nullptr) {
      violations.push_back({Violation::Kind::kNoModelForTask, static_cast<int>(i),
                            "tool '" + call.tool + "' names no registered model"});
      plan.tasks.push_back(std::move(task));
      continue;
    }
    task.task_type = model->task_type;
    task.objective = model->objective;
    for (auto it = call.arguments.begin(); it != call.arguments.end(); ++it) {
      try {
        task.slots.push_back({it.key(), slot_value_from_json(it.value())});
      } catch (const Error&) {
        throw Error(ErrorCode::kProtocolError, "tool call " + call.call_id +
                                                   " argument '" + it.key() +
                                                   "' has an unusable shape");
      }
    }
    plan.tasks.push_back(std::move(task));
  }
  // The assistant chooses tools directly, so the only planning violations it
  // can cause are unknown tools and missing arguments; both surface here.
  if (violations.empty()) violations = validate_plan(plan, registry);
  if (!violations.empty()) {
    std::string detail = "plan rejected:";
    for (const Violation& v : violations) detail += " " + to_string(v);
    throw Error(ErrorCode::kPlanRejected, detail);
  }
  return plan;
}

}  // namespace netorch
