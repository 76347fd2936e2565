// netorch: terminal front end for the orchestration pipeline. Subcommands:
//
//   chat           interactive query session (mock or llm backend)
//   run            one scenario, one solver, JSON result
//   bench          scaling sweep over cell counts and seeds, CSV output
//   registry-list  print the model repository
//   memory-show    print the tail of an experience archive
//
// Exit codes are a stable scripting contract: 0 success, 1 domain/solver
// failure, 2 usage or configuration failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "netorch/canonical.hpp"
#include "netorch/errors.hpp"
#include "netorch/llmgw.hpp"
#include "netorch/memory.hpp"
#include "netorch/pipeline.hpp"
#include "netorch/planner.hpp"
#include "netorch/registry.hpp"
#include "netorch/simenv.hpp"
#include "netorch/solvers.hpp"

using namespace netorch;

namespace {

std::string fixed(double x, int precision) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", precision, x);
  return buffer;
}

// ---------------------------------------------------------------------------
// Settings: flags > NETORCH_LLM_* environment > --config JSON > defaults.

struct Settings {
  std::string backend = "mock";
  std::string registry_path;       // empty -> built-in registry
  std::string memory_path;         // empty -> session-only memory
  std::string shared_memory_path;  // optional read-only archive
  std::string replay_path;         // scripted gateway transport
  GatewayConfig gateway;
};

constexpr const char* kDefaultEndpoint = "http://127.0.0.1:8000/v1/chat/completions";
constexpr const char* kDefaultModel = "mistral-7b-instruct";

// Flat object of optional string fields mirroring the flags; anything
// else is a config error.
Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const Json config = parse_json(text, path);
  if (!config.is_object()) {
    throw Error(ErrorCode::kParseError, path + " must be a JSON object");
  }
  static const std::set<std::string> known = {"api_key",  "backend", "endpoint",
                                              "memory",   "model",   "registry",
                                              "replay",   "shared_memory"};
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (!known.contains(it.key())) {
      throw Error(ErrorCode::kParseError, path + " has unknown field '" + it.key() + "'");
    }
    if (!it.value().is_string()) {
      throw Error(ErrorCode::kParseError, path + "." + it.key() + " must be a string");
    }
  }
  return config;
}

std::string pick(const std::string& flag_value, bool flag_set, const char* env_name,
                 const Json& config, const char* key, std::string fallback) {
  if (flag_set) return flag_value;
  if (env_name != nullptr) {
    const char* value = std::getenv(env_name);
    if (value != nullptr && *value != '\0') return value;
  }
  if (auto it = config.find(key); it != config.end()) return it->get<std::string>();
  return fallback;
}

Registry load_registry_or_default(const std::string& path) {
  return path.empty() ? default_registry() : load_registry(path);
}

MemoryStore open_memory(const Settings& settings) {
  if (settings.memory_path.empty()) return MemoryStore();
  std::optional<std::string> shared;
  if (!settings.shared_memory_path.empty()) shared = settings.shared_memory_path;
  return MemoryStore::open(settings.memory_path, shared);
}

int startup_failure(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 2;
}

// ---------------------------------------------------------------------------
// run / bench shared solver plumbing

struct SolveOutcome {
  Allocation allocation;
  std::vector<double> per_ue;  // sinrs or rates
  double runtime_ms = 0.0;
};

bool is_power_objective(const std::string& objective) {
  return objective == "maxmin" || objective == "maxprod" || objective == "uniform";
}

SolveOutcome solve_power(const PowerProblem& problem, const std::string& objective) {
  SolveOutcome outcome;
  const auto started = std::chrono::steady_clock::now();
  if (objective == "maxmin") {
    outcome.allocation = solve_power_maxmin(problem);
  } else if (objective == "maxprod") {
    outcome.allocation = solve_power_maxprod(problem);
  } else {
    outcome.allocation = solve_power_uniform(problem);
  }
  outcome.runtime_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  outcome.per_ue = sinr_all(problem, as_power_matrix(problem, outcome.allocation.values));
  return outcome;
}

SolveOutcome solve_bandwidth(const BandwidthProblem& problem, const std::string& objective) {
  SolveOutcome outcome;
  const auto started = std::chrono::steady_clock::now();
  outcome.allocation = objective == "pf_bandwidth" ? solve_bandwidth_pf(problem)
                                                   : solve_bandwidth_equal(problem);
  outcome.runtime_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  for (std::size_t k = 0; k < outcome.allocation.values.size(); ++k) {
    const double b = outcome.allocation.values[k];
    outcome.per_ue.push_back(b * std::log2(1.0 + problem.effective_snr[k] / b));
  }
  return outcome;
}

double geometric_mean(const std::vector<double>& values) {
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

// ---------------------------------------------------------------------------
// subcommands

struct RunFlags {
  std::string scenario_path;
  std::size_t cells = 0;
  std::size_t users = 0;
  std::size_t antennas = 96;
  uint64_t seed = 0;
  std::string objective;
  double pmax = 1000.0;
  double total_bw = 100.0;
  std::string out_path;
};

int cmd_run(const RunFlags& flags) {
  Scenario scenario;
  try {
    if (!flags.scenario_path.empty()) {
      scenario = load_scenario(flags.scenario_path);
    } else if (flags.cells > 0 && flags.users > 0) {
      scenario = generate_scenario(flags.cells, flags.users, flags.antennas, flags.seed);
    } else {
      throw Error(ErrorCode::kParseError,
                  "need either --scenario or --cells and --users");
    }
  } catch (const Error& e) {
    return startup_failure(e);
  }

  Json result;
  SolveOutcome outcome;
  try {
    if (is_power_objective(flags.objective)) {
      const PowerProblem problem = scenario_to_power_problem(scenario, flags.pmax);
      outcome = solve_power(problem, flags.objective);
      result["sinrs"] = outcome.per_ue;
    } else {
      const BandwidthProblem problem = scenario_to_bandwidth_problem(
          scenario, 0, flags.total_bw, /*per_ue_power=*/1000.0, /*n0=*/1.0);
      outcome = solve_bandwidth(problem, flags.objective);
      result["rates"] = outcome.per_ue;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  result["allocation"] = outcome.allocation.values;
  result["min"] = *std::min_element(outcome.per_ue.begin(), outcome.per_ue.end());
  result["geomean"] = geometric_mean(outcome.per_ue);
  result["jain"] = jain_index(outcome.per_ue);
  result["runtime_ms"] = outcome.runtime_ms;

  if (!flags.out_path.empty()) {
    std::ofstream out(flags.out_path, std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write '" << flags.out_path << "'\n";
      return 2;
    }
    out << canonical_dump(result) << '\n';
  }
  std::cout << "objective=" << flags.objective << " L=" << scenario.num_cells
            << " K=" << scenario.num_ues << " min=" << format_double(result["min"])
            << " geomean=" << format_double(result["geomean"])
            << " jain=" << format_double(result["jain"])
            << " runtime_ms=" << fixed(outcome.runtime_ms, 3) << "\n";
  return 0;
}

struct BenchFlags {
  std::string cells_list = "1,4,16";
  std::size_t users = 10;
  std::size_t antennas = 96;
  std::size_t seeds = 3;
  double pmax = 1000.0;
  std::string out_path;
};

int cmd_bench(const BenchFlags& flags) {
  std::vector<std::size_t> cells;
  try {
    std::istringstream list(flags.cells_list);
    std::string item;
    while (std::getline(list, item, ',')) {
      const long value = std::stol(item);
      if (value < 1) throw std::invalid_argument(item);
      cells.push_back(static_cast<std::size_t>(value));
    }
    if (cells.empty() || flags.seeds == 0) {
      throw Error(ErrorCode::kParseError, "--cells-list and --seeds must be non-empty");
    }
  } catch (const Error& e) {
    return startup_failure(e);
  } catch (const std::exception&) {
    std::cerr << "error: --cells-list must be comma-separated positive integers\n";
    return 2;
  }

  static const std::vector<std::string> kObjectives = {"maxmin", "maxprod", "uniform"};
  std::string csv = "L,K,seed,objective,min_sinr,geomean_sinr,jain,runtime_ms\n";
  bool any_failure = false;
  for (std::size_t L : cells) {
    for (uint64_t seed = 0; seed < flags.seeds; ++seed) {
      Scenario scenario;
      try {
        scenario = generate_scenario(L, flags.users, flags.antennas, seed);
      } catch (const Error& e) {
        return startup_failure(e);
      }
      const PowerProblem problem = scenario_to_power_problem(scenario, flags.pmax);
      for (const std::string& objective : kObjectives) {
        std::string row = std::to_string(L) + "," + std::to_string(flags.users) + "," +
                          std::to_string(seed) + "," + objective + ",";
        try {
          const SolveOutcome outcome = solve_power(problem, objective);
          row += format_double(*std::min_element(outcome.per_ue.begin(),
                                                 outcome.per_ue.end())) +
                 "," + format_double(geometric_mean(outcome.per_ue)) + "," +
                 format_double(jain_index(outcome.per_ue)) + "," +
                 fixed(outcome.runtime_ms, 3);
        } catch (const Error& e) {
          // Mark the row but keep sweeping; the exit code reports it.
          std::cerr << "error: L=" << L << " seed=" << seed << " " << objective << ": "
                    << e.what() << "\n";
          row += "nan,nan,nan,nan";
          any_failure = true;
        }
        csv += row + "\n";
      }
    }
  }

  if (!flags.out_path.empty()) {
    std::ofstream out(flags.out_path, std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write '" << flags.out_path << "'\n";
      return 2;
    }
    out << csv;
  } else {
    std::cout << csv;
  }
  return any_failure ? 1 : 0;
}

int cmd_registry_list(const Settings& settings) {
  Registry registry;
  try {
    registry = load_registry_or_default(settings.registry_path);
  } catch (const Error& e) {
    return startup_failure(e);
  }
  std::printf("%-22s %-22s %-24s %9s  %s\n", "model_id", "task_type", "objective",
              "downloads", "source");
  for (const ModelDescriptor* model : registry.list_models()) {
    std::printf("%-22s %-22s %-24s %9llu  %s\n", model->model_id.c_str(),
                std::string(to_string(model->task_type)).c_str(),
                std::string(to_string(model->objective)).c_str(),
                static_cast<unsigned long long>(model->download_count),
                std::string(to_string(model->source)).c_str());
  }
  return 0;
}

int cmd_memory_show(const Settings& settings, std::size_t last) {
  MemoryStore store;
  try {
    store = open_memory(settings);
  } catch (const Error& e) {
    return startup_failure(e);
  }
  std::cout << store.size() << " records\n";
  const int64_t total = static_cast<int64_t>(store.size());
  const int64_t begin = std::max<int64_t>(0, total - static_cast<int64_t>(last));
  for (int64_t id = begin; id < total; ++id) {
    const MemoryRecord& record = store.record(id);
    std::cout << "[" << id << "] " << record.query_text << "\n";
    if (record.feedback.has_value()) {
      std::cout << "    feedback: " << (record.feedback->rating > 0 ? "+" : "")
                << record.feedback->rating;
      if (!record.feedback->note.empty()) std::cout << " (" << record.feedback->note << ")";
      std::cout << "\n";
    }
  }
  return 0;
}

int cmd_chat(const Settings& settings) {
  Registry registry;
  MemoryStore memory;
  PlannerOptions options;
  std::optional<ReplayTransport> replay;
  try {
    registry = load_registry_or_default(settings.registry_path);
    memory = open_memory(settings);
    if (settings.backend == "mock") {
      options.backend = PlannerBackend::kMock;
    } else if (settings.backend == "llm") {
      options.backend = PlannerBackend::kLlm;
      options.gateway = &settings.gateway;
      if (!settings.replay_path.empty()) {
        replay = ReplayTransport::from_file(settings.replay_path);
        options.transport = &*replay;
      }
    } else {
      throw Error(ErrorCode::kParseError,
                  "unknown backend '" + settings.backend + "' (expected mock or llm)");
    }
  } catch (const Error& e) {
    return startup_failure(e);
  }

  std::cout << "netorch chat (" << settings.backend << " backend, " << registry.size()
            << " models, " << memory.size() << " memory records)\n"
            << "attach a scenario with @path; 'quit' ends the session\n";
  const bool interactive = isatty(STDIN_FILENO) != 0;
  std::string line;
  while (true) {
    if (interactive) std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;

    // Pull one "@path" attachment out of the raw line; the rest is the query.
    std::istringstream words(line);
    std::string word, query, attach_path;
    while (words >> word) {
      if (word.size() > 1 && word[0] == '@' && attach_path.empty()) {
        attach_path = word.substr(1);
        continue;
      }
      if (!query.empty()) query += ' ';
      query += word;
    }
    if (query.empty() && attach_path.empty()) continue;
    if (query == "quit" || query == "exit") break;

    try {
      std::optional<Json> payload;
      if (!attach_path.empty()) {
        payload = build_payload_from_scenario(load_scenario(attach_path));
      }
      const std::vector<ScoredRecord> related = memory.retrieve(query, 3);
      const ChatTurnResult turn =
          run_chat_query(query, payload, registry, options, &memory);
      if (!related.empty()) {
        std::cout << "related past interactions:\n";
        for (const ScoredRecord& hit : related) {
          std::cout << "  [" << hit.record.record_id << "] score " << fixed(hit.score, 4)
                    << ": " << hit.record.query_text << "\n";
        }
      }
      std::cout << turn.response.summary_text << "[stored as record " << turn.record_id
                << "]\n";
    } catch (const Error& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-orchestrated wireless resource allocation"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON settings file");

  std::string backend_flag, registry_flag, memory_flag, shared_flag, replay_flag;
  std::string endpoint_flag, api_key_flag, model_flag;

  CLI::App* chat = app.add_subcommand("chat", "interactive query session");
  CLI::Option* chat_backend = chat->add_option("--backend", backend_flag, "mock or llm");
  CLI::Option* chat_registry = chat->add_option("--registry", registry_flag, "registry JSON");
  CLI::Option* chat_memory = chat->add_option("--memory", memory_flag, "archive JSONL");
  CLI::Option* chat_shared =
      chat->add_option("--shared-memory", shared_flag, "read-only archive JSONL");
  CLI::Option* chat_replay =
      chat->add_option("--replay", replay_flag, "scripted gateway replies (JSONL)");
  CLI::Option* chat_endpoint = chat->add_option("--endpoint", endpoint_flag, "gateway URL");
  CLI::Option* chat_api_key = chat->add_option("--api-key", api_key_flag, "gateway key");
  CLI::Option* chat_model = chat->add_option("--model", model_flag, "gateway model name");

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "solve one scenario");
  run->add_option("--scenario", run_flags.scenario_path, "scenario JSON");
  run->add_option("--cells", run_flags.cells, "generate: number of cells");
  run->add_option("--users", run_flags.users, "generate: UEs per cell");
  run->add_option("--antennas", run_flags.antennas, "generate: BS antennas");
  run->add_option("--seed", run_flags.seed, "generate: scenario seed");
  run->add_option("--objective", run_flags.objective)
      ->required()
      ->check(CLI::IsMember({"maxmin", "maxprod", "uniform", "pf_bandwidth", "equal"}));
  run->add_option("--pmax", run_flags.pmax, "per-BS power budget");
  run->add_option("--total-bw", run_flags.total_bw, "bandwidth budget (bandwidth objectives)");
  run->add_option("--out", run_flags.out_path, "result JSON path");

  BenchFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "scaling sweep, CSV output");
  bench->add_option("--cells-list", bench_flags.cells_list, "comma-separated cell counts");
  bench->add_option("--users", bench_flags.users, "UEs per cell");
  bench->add_option("--antennas", bench_flags.antennas, "BS antennas");
  bench->add_option("--seeds", bench_flags.seeds, "seeds 0..N-1 per cell count");
  bench->add_option("--pmax", bench_flags.pmax, "per-BS power budget");
  bench->add_option("--out", bench_flags.out_path, "CSV path (default stdout)");

  CLI::App* registry_list = app.add_subcommand("registry-list", "print the model repository");
  CLI::Option* list_registry =
      registry_list->add_option("--registry", registry_flag, "registry JSON");

  std::size_t last = 10;
  CLI::App* memory_show = app.add_subcommand("memory-show", "print recent memory records");
  CLI::Option* show_memory = memory_show->add_option("--memory", memory_flag, "archive JSONL");
  CLI::Option* show_shared =
      memory_show->add_option("--shared-memory", shared_flag, "read-only archive JSONL");
  memory_show->add_option("--last", last, "how many records to show");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // 2 for usage errors; --help stays 0
  }

  Json config = Json::object();
  Settings settings;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    const auto is_set = [](const CLI::Option* option) {
      return option != nullptr && option->count() > 0;
    };
    settings.backend = pick(backend_flag, is_set(chat_backend), nullptr, config,
                            "backend", "mock");
    settings.registry_path =
        pick(registry_flag, is_set(chat_registry) || is_set(list_registry), nullptr,
             config, "registry", "");
    settings.memory_path = pick(memory_flag, is_set(chat_memory) || is_set(show_memory),
                                nullptr, config, "memory", "");
    settings.shared_memory_path =
        pick(shared_flag, is_set(chat_shared) || is_set(show_shared), nullptr, config,
             "shared_memory", "");
    settings.replay_path =
        pick(replay_flag, is_set(chat_replay), nullptr, config, "replay", "");
    settings.gateway.endpoint = pick(endpoint_flag, is_set(chat_endpoint),
                                     "NETORCH_LLM_ENDPOINT", config, "endpoint",
                                     kDefaultEndpoint);
    settings.gateway.api_key = pick(api_key_flag, is_set(chat_api_key),
                                    "NETORCH_LLM_API_KEY", config, "api_key", "");
    settings.gateway.model =
        pick(model_flag, is_set(chat_model), "NETORCH_LLM_MODEL", config, "model",
             kDefaultModel);
  } catch (const Error& e) {
    return startup_failure(e);
  }

  if (*chat) return cmd_chat(settings);
  if (*run) return cmd_run(run_flags);
  if (*bench) return cmd_bench(bench_flags);
  if (*registry_list) return cmd_registry_list(settings);
  if (*memory_show) return cmd_memory_show(settings, last);
  return 2;
}
