#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "netorch/canonical.hpp"
#include "netorch/llmgw.hpp"
#include "netorch/registry.hpp"
#include "test_support.hpp"

using namespace netorch;

namespace {

constexpr const char* kCli = NETORCH_CLI_PATH;
constexpr const char* kDataDir = NETORCH_DATA_DIR;

std::string shell_quote(const std::string& text) {
  std::string quoted = "'";
  for (char c : text) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted += c;
    }
  }
  quoted += "'";
  return quoted;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  TempDir io;
  write_file(io.file("stdin"), stdin_text);
  std::string command = shell_quote(kCli);
  for (const std::string& arg : args) command += " " + shell_quote(arg);
  command += " < " + shell_quote(io.file("stdin"));
  command += " > " + shell_quote(io.file("stdout"));
  command += " 2> " + shell_quote(io.file("stderr"));

  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(io.file("stdout"));
  result.err = read_file(io.file("stderr"));
  return result;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> fields;
  std::istringstream in(row);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

std::string data_path(const std::string& name) {
  return std::string(kDataDir) + "/" + name;
}

}  // namespace

TEST_CASE("usage errors exit 2; help exits 0") {
  CHECK(run_cli({}).exit_code == 2);
  CHECK(run_cli({"no-such-subcommand"}).exit_code == 2);
  CHECK(run_cli({"run"}).exit_code == 2);  // --objective is required
  CHECK(run_cli({"run", "--objective", "bogus"}).exit_code == 2);
  CHECK(run_cli({"chat", "--no-such-flag"}).exit_code == 2);

  const CliResult help = run_cli({"--help"});
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("chat") != std::string::npos);
  CHECK(help.out.find("bench") != std::string::npos);
}

TEST_CASE("registry-list prints one row per built-in model") {
  const CliResult result = run_cli({"registry-list"});
  REQUIRE(result.exit_code == 0);
  const std::vector<std::string> lines = lines_of(result.out);
  REQUIRE(lines.size() == 7);  // header + six models
  CHECK(lines[0].rfind("model_id", 0) == 0);
  for (const char* id :
       {"pf_bandwidth_v1", "equal_bandwidth_v1", "maxmin_power_v1", "maxprod_power_v1",
        "uniform_power_v1", "waterfilling_v1"}) {
    CAPTURE(id);
    CHECK(result.out.find(id) != std::string::npos);
  }
  // Rows carry the task/objective/download columns.
  const auto maxmin = std::find_if(lines.begin(), lines.end(), [](const std::string& l) {
    return l.rfind("maxmin_power_v1", 0) == 0;
  });
  REQUIRE(maxmin != lines.end());
  CHECK(maxmin->find("power_allocation") != std::string::npos);
  CHECK(maxmin->find("max_min_sinr") != std::string::npos);
  CHECK(maxmin->find("3875") != std::string::npos);

  // The shipped registry file describes the same repository.
  const CliResult from_file = run_cli({"registry-list", "--registry", data_path("registry.json")});
  REQUIRE(from_file.exit_code == 0);
  CHECK(from_file.out == result.out);

  const CliResult missing = run_cli({"registry-list", "--registry", "/no/such/file.json"});
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("error:") != std::string::npos);
}

TEST_CASE("run solves a generated scenario and writes a result file") {
  TempDir dir;
  const std::string out_path = dir.file("result.json");
  const CliResult result =
      run_cli({"run", "--cells", "2", "--users", "3", "--seed", "1", "--objective",
               "maxmin", "--pmax", "10", "--out", out_path});
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.rfind("objective=maxmin L=2 K=3 min=", 0) == 0);
  CHECK(result.out.find(" jain=") != std::string::npos);

  const Json doc = parse_json(read_file(out_path), "result");
  const std::vector<double> allocation = doc["allocation"].get<std::vector<double>>();
  const std::vector<double> sinrs = doc["sinrs"].get<std::vector<double>>();
  REQUIRE(allocation.size() == 6);
  REQUIRE(sinrs.size() == 6);
  for (std::size_t cell = 0; cell < 2; ++cell) {
    double cell_power = 0.0;
    for (std::size_t k = 0; k < 3; ++k) cell_power += allocation[cell * 3 + k];
    CHECK(cell_power <= 10.0 * (1.0 + 1e-9));
  }
  const double min_sinr = *std::min_element(sinrs.begin(), sinrs.end());
  CHECK(doc["min"].get<double>() == min_sinr);
  CHECK(doc["jain"].get<double>() > 0.0);
  CHECK(doc["jain"].get<double>() <= 1.0 + 1e-12);
  CHECK(doc["runtime_ms"].get<double>() >= 0.0);

  // Same flags -> same result, down to the bytes, modulo the timing field.
  const std::string second_path = dir.file("result2.json");
  REQUIRE(run_cli({"run", "--cells", "2", "--users", "3", "--seed", "1", "--objective",
                   "maxmin", "--pmax", "10", "--out", second_path})
              .exit_code == 0);
  Json first = parse_json(read_file(out_path), "first");
  Json second = parse_json(read_file(second_path), "second");
  first.erase("runtime_ms");
  second.erase("runtime_ms");
  CHECK(canonical_dump(first) == canonical_dump(second));
}

TEST_CASE("run consumes stored scenarios for bandwidth objectives") {
  TempDir dir;
  const std::string out_path = dir.file("bw.json");
  const CliResult pf =
      run_cli({"run", "--scenario", data_path("scenario_L1_K20_seed7.json"),
               "--objective", "pf_bandwidth", "--total-bw", "100", "--out", out_path});
  REQUIRE(pf.exit_code == 0);
  CHECK(pf.out.rfind("objective=pf_bandwidth L=1 K=20", 0) == 0);

  const Json doc = parse_json(read_file(out_path), "bw");
  const std::vector<double> allocation = doc["allocation"].get<std::vector<double>>();
  REQUIRE(allocation.size() == 20);
  double total = 0.0;
  for (double b : allocation) {
    CHECK(b > 0.0);
    total += b;
  }
  CHECK(total == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(doc["rates"].get<std::vector<double>>().size() == 20);

  const std::string equal_path = dir.file("equal.json");
  REQUIRE(run_cli({"run", "--scenario", data_path("scenario_L1_K20_seed7.json"),
                   "--objective", "equal", "--total-bw", "100", "--out", equal_path})
              .exit_code == 0);
  const Json equal = parse_json(read_file(equal_path), "equal");
  for (const auto& b : equal["allocation"]) CHECK(b.get<double>() == 5.0);
}

TEST_CASE("run separates configuration failures from solver failures") {
  // No scenario source at all: usage problem.
  CHECK(run_cli({"run", "--objective", "maxmin"}).exit_code == 2);
  CHECK(run_cli({"run", "--scenario", "/no/such.json", "--objective", "maxmin"}).exit_code ==
        2);
  // A well-formed invocation whose problem is mathematically invalid.
  const CliResult domain = run_cli({"run", "--cells", "1", "--users", "2", "--objective",
                                    "pf_bandwidth", "--total-bw", "-5"});
  CHECK(domain.exit_code == 1);
  CHECK(domain.err.find("error:") != std::string::npos);
  // Unwritable output location.
  CHECK(run_cli({"run", "--cells", "1", "--users", "2", "--objective", "uniform", "--out",
                 "/no/such/dir/out.json"})
            .exit_code == 2);
}

TEST_CASE("bench sweeps cells, seeds, and objectives into CSV") {
  const CliResult result =
      run_cli({"bench", "--cells-list", "1,4", "--users", "2", "--seeds", "2", "--pmax",
               "10"});
  REQUIRE(result.exit_code == 0);
  const std::vector<std::string> lines = lines_of(result.out);
  REQUIRE(lines.size() == 13);  // header + 2 cells x 2 seeds x 3 objectives
  CHECK(lines[0] == "L,K,seed,objective,min_sinr,geomean_sinr,jain,runtime_ms");
  CHECK(result.out.find("nan") == std::string::npos);

  static const std::vector<std::string> kObjectives = {"maxmin", "maxprod", "uniform"};
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::vector<std::string> fields = split_csv_row(lines[row]);
    REQUIRE(fields.size() == 8);
    const std::size_t index = row - 1;
    CHECK(fields[0] == (index < 6 ? "1" : "4"));
    CHECK(fields[1] == "2");
    CHECK(fields[2] == std::to_string((index / 3) % 2));
    CHECK(fields[3] == kObjectives[index % 3]);
    CHECK(std::stod(fields[4]) > 0.0);  // min SINR
    CHECK(std::stod(fields[6]) <= 1.0 + 1e-12);
  }

  // --out writes the identical table (timing column aside).
  TempDir dir;
  const std::string csv_path = dir.file("bench.csv");
  REQUIRE(run_cli({"bench", "--cells-list", "1,4", "--users", "2", "--seeds", "2",
                   "--pmax", "10", "--out", csv_path})
              .exit_code == 0);
  const std::vector<std::string> file_lines = lines_of(read_file(csv_path));
  REQUIRE(file_lines.size() == lines.size());
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const std::string strip_a = lines[row].substr(0, lines[row].rfind(','));
    const std::string strip_b = file_lines[row].substr(0, file_lines[row].rfind(','));
    CHECK(strip_a == strip_b);
  }
}

TEST_CASE("bench rejects malformed sweep lists") {
  CHECK(run_cli({"bench", "--cells-list", ""}).exit_code == 2);
  CHECK(run_cli({"bench", "--cells-list", "1,zero"}).exit_code == 2);
  CHECK(run_cli({"bench", "--cells-list", "0"}).exit_code == 2);
  CHECK(run_cli({"bench", "--seeds", "0"}).exit_code == 2);
}

TEST_CASE("chat turns persist to the archive memory-show reads") {
  TempDir dir;
  const std::string memory_path = dir.file("memory.jsonl");

  const CliResult empty = run_cli({"memory-show"});
  REQUIRE(empty.exit_code == 0);
  CHECK(empty.out == "0 records\n");

  // The attachment supplies the per-user gains; the @path is stripped from the
  // stored query text, so both turns archive under the identical sentence.
  const std::string turn =
      "Split 100 bandwidth units among 2 users with proportional fairness @" +
      data_path("scenario_L1_K20_seed7.json") + "\n";
  const std::string session = turn + turn + "quit\n";
  const CliResult chat = run_cli({"chat", "--memory", memory_path}, session);
  REQUIRE(chat.exit_code == 0);
  CHECK(chat.out.find("netorch chat (mock backend, 6 models, 0 memory records)") !=
        std::string::npos);
  CHECK(chat.out.find("[stored as record 0]") != std::string::npos);
  CHECK(chat.out.find("[stored as record 1]") != std::string::npos);
  // The second, identical query surfaces the first as related context.
  CHECK(chat.out.find("related past interactions:") != std::string::npos);
  CHECK(chat.out.find("[0] score 1.0000:") != std::string::npos);

  const CliResult shown = run_cli({"memory-show", "--memory", memory_path});
  REQUIRE(shown.exit_code == 0);
  const std::vector<std::string> lines = lines_of(shown.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "2 records");
  CHECK(lines[1].rfind("[0] Split 100 bandwidth units", 0) == 0);
  CHECK(lines[2].rfind("[1] Split 100 bandwidth units", 0) == 0);

  const CliResult tail = run_cli({"memory-show", "--memory", memory_path, "--last", "1"});
  REQUIRE(tail.exit_code == 0);
  CHECK(lines_of(tail.out).size() == 2);
  CHECK(tail.out.find("[1] ") != std::string::npos);
  CHECK(tail.out.find("[0] ") == std::string::npos);

  // A later session opens with the persisted archive in its banner.
  const CliResult reopened = run_cli({"chat", "--memory", memory_path}, "quit\n");
  CHECK(reopened.out.find("2 memory records") != std::string::npos);
}

TEST_CASE("chat attaches scenarios and reports per-query errors without dying") {
  const std::string session =
      "tell me a story\n"
      "Split 100 bandwidth units with proportional fairness @" +
      data_path("scenario_L1_K20_seed7.json") +
      "\n"
      "check the @/missing/file.json attachment\n"
      "quit\n";
  const CliResult chat = run_cli({"chat"}, session);
  REQUIRE(chat.exit_code == 0);
  // Query 1: not a resource-allocation request; reported, session continues.
  CHECK(chat.out.find("error: ") != std::string::npos);
  // Query 2: attachment stripped from the query text, 20-user allocation runs.
  CHECK(chat.out.find("Query: Split 100 bandwidth units with proportional fairness\n") !=
        std::string::npos);
  CHECK(chat.out.find("allocation (20 entries, sum 100.000000)") != std::string::npos);
  CHECK(chat.out.find("[stored as record 0]") != std::string::npos);
  // Query 3: unreadable attachment is that query's error only.
  CHECK(chat.out.find("cannot open") != std::string::npos);

  CHECK(run_cli({"chat", "--backend", "nonsense"}).exit_code == 2);
}

TEST_CASE("chat llm backend runs scripted gateway traffic from a replay file") {
  const Registry registry = default_registry();
  GatewayConfig config;
  config.model = "scripted";
  const std::string query = "plan a fair bandwidth split for two users";
  const std::vector<ChatMessage> messages = {
      {.role = ChatRole::kSystem, .content = build_system_prompt(registry)},
      {.role = ChatRole::kUser, .content = query},
  };
  const std::string request =
      build_chat_request(config, messages, tool_schemas_from_registry(registry));
  const Json response{
      {"choices",
       Json::array(
           {Json{{"message",
                  Json{{"content", nullptr},
                       {"tool_calls",
                        Json::array({Json{
                            {"id", "call_0"},
                            {"type", "function"},
                            {"function",
                             Json{{"name", "pf_bandwidth_v1"},
                                  {"arguments",
                                   R"({"gains":[50,200],"total_bw":100})"}}}}})}}}}})}};

  TempDir dir;
  const std::string replay_path = dir.file("replay.jsonl");
  write_file(replay_path,
             canonical_dump(Json{{"digest", request_digest(request)},
                                 {"response", response}}) +
                 "\n");

  const CliResult chat = run_cli(
      {"chat", "--backend", "llm", "--replay", replay_path, "--model", "scripted"},
      query + "\nquit\n");
  REQUIRE(chat.exit_code == 0);
  CHECK(chat.out.find("netorch chat (llm backend") != std::string::npos);
  CHECK(chat.out.find("Query: " + query + "\n") != std::string::npos);
  CHECK(chat.out.find("allocation (2 entries, sum 100.000000)") != std::string::npos);
  CHECK(chat.out.find("[stored as record 0]") != std::string::npos);

  // A query the script does not cover fails that turn, not the session.
  const CliResult miss = run_cli(
      {"chat", "--backend", "llm", "--replay", replay_path, "--model", "scripted"},
      "some other query\nquit\n");
  REQUIRE(miss.exit_code == 0);
  CHECK(miss.out.find("error: ") != std::string::npos);
  CHECK(miss.out.find("replay script has no entry") != std::string::npos);

  CHECK(run_cli({"chat", "--backend", "llm", "--replay", "/no/such/replay.jsonl"})
            .exit_code == 2);
}

TEST_CASE("config files fill in unset flags; flags win") {
  TempDir dir;
  const std::string config_path = dir.file("config.json");
  write_file(config_path, Json{{"registry", data_path("registry.json")}}.dump());
  CHECK(run_cli({"--config", config_path, "registry-list"}).exit_code == 0);

  // The flag overrides the config's (broken) value.
  write_file(config_path, Json{{"registry", "/no/such/registry.json"}}.dump());
  CHECK(run_cli({"--config", config_path, "registry-list"}).exit_code == 2);
  CHECK(run_cli({"--config", config_path, "registry-list", "--registry",
                 data_path("registry.json")})
            .exit_code == 0);

  write_file(config_path, R"({"registry": 7})");
  const CliResult bad_type = run_cli({"--config", config_path, "registry-list"});
  CHECK(bad_type.exit_code == 2);
  CHECK(bad_type.err.find("must be a string") != std::string::npos);

  write_file(config_path, R"({"mystery": "x"})");
  const CliResult unknown = run_cli({"--config", config_path, "registry-list"});
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("unknown field") != std::string::npos);

  CHECK(run_cli({"--config", "/no/such/config.json", "registry-list"}).exit_code == 2);
}
