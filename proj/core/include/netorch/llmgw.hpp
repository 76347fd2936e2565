#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netorch/canonical.hpp"
#include "netorch/executor.hpp"
#include "netorch/planner.hpp"
#include "netorch/registry.hpp"

namespace netorch {

enum class ChatRole { kSystem, kUser, kAssistant, kTool };

std::string_view to_string(ChatRole role);

struct ChatMessage {
  ChatRole role = ChatRole::kUser;
  std::string content;
  std::vector<ToolCall> tool_calls;  // assistant messages only
  std::string tool_call_id;          // tool role: the call being answered

  bool operator==(const ChatMessage&) const = default;
};

struct GatewayConfig {
  std::string endpoint;  // base URL; a bare authority implies /v1/chat/completions
  std::string api_key;   // empty -> no Authorization header
  std::string model;
  int timeout_ms = 30000;
  int max_retries = 2;

  // Overlays NETORCH_LLM_ENDPOINT / NETORCH_LLM_API_KEY / NETORCH_LLM_MODEL
  // onto the given defaults; unset or empty variables leave fields alone.
  static GatewayConfig from_env(GatewayConfig defaults);
  static GatewayConfig from_env() { return from_env(GatewayConfig{}); }
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// One HTTP POST of a JSON body. Implementations throw TransportError for
// connection-level failures; HTTP error statuses come back as values so
// the retry policy can distinguish them.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const GatewayConfig& config, const std::string& body) = 0;
};

// Live client. Plain http only: this build carries no TLS, so point the
// endpoint at a local runtime or proxy.
class HttpTransport : public Transport {
 public:
  HttpResponse post(const GatewayConfig& config, const std::string& body) override;
};

// Scripted transport for offline runs and goldens: a JSON-Lines file of
// {"digest", "response"} where digest is the request-body digest below and
// response is returned as a 200 body. An unknown digest raises
// ProtocolError immediately — a gap in the script is a bug to surface,
// not a flaky network to retry.
class ReplayTransport : public Transport {
 public:
  static ReplayTransport from_file(const std::string& path);

  void add(const std::string& request_body, const Json& response);
  HttpResponse post(const GatewayConfig& config, const std::string& body) override;

 private:
  std::map<std::string, std::string> responses_;  // digest -> body bytes
};

// FNV-1a 64 over the raw bytes, as 16 lowercase hex digits.
std::string request_digest(std::string_view body);

// Deterministic role prompt enumerating the repository: id, task/objective,
// description, and inputs for every model (or an explicit "no models are
// registered" line). Identical registries yield byte-identical prompts.
std::string build_system_prompt(const Registry& registry);

// Chat-completions "tools" array: one {type:"function"} entry per model,
// parameters mechanically derived from the input schema.
Json tool_schemas_from_registry(const Registry& registry);

// The exact request body chat_complete posts: canonical JSON over
// (model, messages, tools). Exposed so replay scripts and goldens can be
// built against the same bytes the client sends.
std::string build_chat_request(const GatewayConfig& config,
                               const std::vector<ChatMessage>& messages,
                               const Json& tool_schemas);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Posts the request, retrying transport failures and 5xx responses up to
// config.max_retries with exponential backoff (500 ms base, factor 2;
// sleeper injectable for tests). 401/403 raise AuthError with no retry;
// other 4xx and unparsable bodies raise ProtocolError. Returns the
// assistant message with any tool calls decoded.
ChatMessage chat_complete(const GatewayConfig& config,
                          const std::vector<ChatMessage>& messages,
                          const Json& tool_schemas,
                          Transport* transport = nullptr,
                          const Sleeper& sleeper = {});

// LLM-backed planning: system prompt + user query (payload attached as
// JSON), one task per returned tool call in call order, then the same
// validation the mock path gets. Raises UnrecognizedIntent when the
// assistant returns prose instead of tool calls and PlanRejected (with
// the violations in the message) when validation fails.
Plan plan_with_llm(const GatewayConfig& config, const std::string& query,
                   const std::optional<Json>& payload, const Registry& registry,
                   Transport* transport = nullptr);

}  // namespace netorch
