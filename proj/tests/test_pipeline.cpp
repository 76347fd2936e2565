#include <string>
#include <vector>

#include "doctest.h"
#include "netorch/pipeline.hpp"
#include "netorch/solvers.hpp"
#include "test_support.hpp"

using namespace netorch;

TEST_CASE("one chat turn: plan, execute, compose, no memory attached") {
  const Registry registry = default_registry();
  const std::optional<Json> payload = Json{{"gains", {50.0, 200.0}}};
  const ChatTurnResult turn = run_chat_query(
      "Split 100 bandwidth units among 2 users with proportional fairness", payload,
      registry, PlannerOptions{});

  CHECK(turn.record_id == -1);
  REQUIRE(turn.plan.tasks.size() == 1);
  CHECK(turn.plan.tasks[0].objective == Objective::kProportionalFairness);
  REQUIRE(turn.trace.calls.size() == 1);
  CHECK(turn.trace.calls[0].result.status == ToolResult::Status::kOk);
  CHECK(turn.trace.calls[0].selected.model_id == "pf_bandwidth_v1");

  // The solver output must be the library answer, not a re-derivation.
  const Allocation direct =
      solve_bandwidth_pf({.total_bw = 100.0, .effective_snr = {50.0, 200.0}});
  const Json& allocation = turn.trace.calls[0].result.output["allocation"];
  REQUIRE(allocation.size() == 2);
  CHECK(allocation[0].get<double>() == direct.values[0]);
  CHECK(allocation[1].get<double>() == direct.values[1]);

  // The composed response is a pure function of the trace.
  const ResponseDocument recomposed = compose_response(turn.trace);
  CHECK(turn.response.summary_text == recomposed.summary_text);
  CHECK(turn.response.metrics == recomposed.metrics);
  CHECK(canonical_dump(turn.response.structured_results) ==
        canonical_dump(recomposed.structured_results));
  CHECK(turn.response.summary_text.rfind("Query: Split 100", 0) == 0);
  CHECK(turn.response.metrics.count("task0.wall_ms") == 1);
  CHECK(turn.response.metrics.count("task0.utility") == 1);
}

TEST_CASE("chat turns append to an attached memory store") {
  const Registry registry = default_registry();
  MemoryStore memory;

  const ChatTurnResult first =
      run_chat_query("Split 60 bandwidth units among 3 users",
                     Json{{"gains", {1.0, 2.0, 3.0}}}, registry, PlannerOptions{}, &memory);
  CHECK(first.record_id == 0);
  const ChatTurnResult second =
      run_chat_query("equal bandwidth split of 30 bandwidth units",
                     Json{{"gains", {1.0, 2.0}}}, registry, PlannerOptions{}, &memory);
  CHECK(second.record_id == 1);
  REQUIRE(memory.size() == 2);

  // The archived record mirrors the turn exactly.
  const std::vector<ScoredRecord> hits =
      memory.retrieve("Split 60 bandwidth units among 3 users", 1);
  REQUIRE(hits.size() == 1);
  const MemoryRecord& record = hits[0].record;
  CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(record.record_id == first.record_id);
  CHECK(record.query_text == "Split 60 bandwidth units among 3 users");
  CHECK(record.plan_text == canonical_dump(first.plan.to_json()));
  CHECK(record.summary_text == first.response.summary_text);
  CHECK(record.metrics == first.response.metrics);
}

TEST_CASE("planner failures propagate before anything is archived") {
  const Registry registry = default_registry();
  MemoryStore memory;
  expect_error(
      [&] {
        run_chat_query("please do something unspecified", std::nullopt, registry,
                       PlannerOptions{}, &memory);
      },
      ErrorCode::kUnrecognizedIntent);
  CHECK(memory.empty());
}

TEST_CASE("solver-level failures still archive the turn") {
  const Registry registry = default_registry();
  MemoryStore memory;
  // Negative budget passes planning (it is just a number slot) and fails
  // inside the solver, which becomes an error result, not an exception.
  const ChatTurnResult turn =
      run_chat_query("proportional fairness bandwidth split",
                     Json{{"total_bw", -5.0}, {"gains", {1.0, 2.0}}}, registry,
                     PlannerOptions{}, &memory);
  CHECK(turn.record_id == 0);
  REQUIRE(turn.trace.calls.size() == 1);
  CHECK(turn.trace.calls[0].result.status == ToolResult::Status::kError);
  CHECK(turn.response.summary_text.find("ERROR") != std::string::npos);
  CHECK(memory.size() == 1);
}

TEST_CASE("scenario payloads carry every field the planner can attach") {
  const Scenario scenario = generate_scenario(4, 3, 96, /*seed=*/7);
  const Json payload = build_payload_from_scenario(scenario);

  const std::vector<std::string> expected_keys = {"cross_gain", "gains",       "noise",
                                                  "p_max",      "signal_gain", "total_power"};
  std::vector<std::string> keys;
  for (const auto& [key, value] : payload.items()) keys.push_back(key);
  CHECK(keys == expected_keys);

  const PowerProblem power = scenario_to_power_problem(scenario, 1000.0);
  CHECK(payload["signal_gain"].get<Matrix>() == power.signal_gain);
  CHECK(payload["cross_gain"].get<Matrix>() == power.cross_gain);
  CHECK(payload["noise"] == power.noise);
  CHECK(payload["p_max"] == 1000.0);
  CHECK(payload["total_power"] == 1000.0);

  const BandwidthProblem bandwidth =
      scenario_to_bandwidth_problem(scenario, 0, 1.0, 1000.0, 1.0);
  CHECK(payload["gains"].get<std::vector<double>>() == bandwidth.effective_snr);

  // Non-default options change the knobs they own and nothing else.
  const Json tuned =
      build_payload_from_scenario(scenario, {.p_max = 50.0, .per_ue_power = 10.0,
                                             .n0 = 2.0, .cell = 1});
  CHECK(tuned["p_max"] == 50.0);
  CHECK(tuned["total_power"] == 50.0);
  CHECK(tuned["signal_gain"].get<Matrix>() == power.signal_gain);
  const BandwidthProblem cell1 = scenario_to_bandwidth_problem(scenario, 1, 1.0, 10.0, 2.0);
  CHECK(tuned["gains"].get<std::vector<double>>() == cell1.effective_snr);
}

TEST_CASE("a multi-cell scenario drives a full power-allocation turn") {
  const Scenario scenario = generate_scenario(2, 2, 96, /*seed=*/11);
  const std::optional<Json> payload = build_payload_from_scenario(scenario, {.p_max = 10.0});

  const ChatTurnResult turn =
      run_chat_query("optimize power allocation for the worst user", payload,
                     default_registry(), PlannerOptions{});
  REQUIRE(turn.plan.tasks.size() == 1);
  const TaskSpec& task = turn.plan.tasks[0];
  CHECK(task.task_type == TaskType::kPowerAllocation);
  CHECK(task.objective == Objective::kMaxMinSinr);
  // The task carries every payload field the power-model family can consume,
  // in the declared slot order; the executor narrows to the chosen model's
  // schema when it builds the tool call.
  REQUIRE(task.slots.size() == 6);
  CHECK(task.slots[0].name == "signal_gain");
  CHECK(task.slots[1].name == "cross_gain");
  CHECK(task.slots[2].name == "noise");
  CHECK(task.slots[3].name == "p_max");
  CHECK(task.slots[4].name == "gains");
  CHECK(task.slots[5].name == "total_power");

  REQUIRE(turn.trace.calls.size() == 1);
  CHECK(turn.trace.calls[0].result.status == ToolResult::Status::kOk);
  CHECK(turn.trace.calls[0].selected.model_id == "maxmin_power_v1");
  CHECK(turn.response.metrics.count("task0.min_sinr") == 1);

  // Same answer as driving the solver by hand on the same scenario.
  const Allocation direct =
      solve_power_maxmin(scenario_to_power_problem(scenario, 10.0));
  CHECK(turn.response.metrics.at("task0.min_sinr") ==
        doctest::Approx(direct.objective_value).epsilon(1e-12));
}

TEST_CASE("mixed-task queries split one payload across both tasks") {
  const Scenario scenario = generate_scenario(2, 3, 96, /*seed=*/3);
  const std::optional<Json> payload = build_payload_from_scenario(scenario, {.p_max = 10.0});

  const ChatTurnResult turn = run_chat_query(
      "Split 100 bandwidth units with proportional fairness and optimize power "
      "allocation for the worst user",
      payload, default_registry(), PlannerOptions{});
  REQUIRE(turn.plan.tasks.size() == 2);
  CHECK(turn.plan.tasks[0].task_type == TaskType::kBandwidthAllocation);
  CHECK(turn.plan.tasks[1].task_type == TaskType::kPowerAllocation);

  // The bandwidth task saw gains + the query's total_bw, never the matrices.
  const TaskSpec& bw = turn.plan.tasks[0];
  REQUIRE(bw.slots.size() == 2);
  CHECK(bw.slots[0].name == "total_bw");
  CHECK(std::get<double>(bw.slots[0].value) == 100.0);
  CHECK(bw.slots[1].name == "gains");

  REQUIRE(turn.trace.calls.size() == 2);
  CHECK(turn.trace.calls[0].result.status == ToolResult::Status::kOk);
  CHECK(turn.trace.calls[1].result.status == ToolResult::Status::kOk);
  CHECK(turn.response.metrics.count("task0.utility") == 1);
  CHECK(turn.response.metrics.count("task1.min_sinr") == 1);
}
