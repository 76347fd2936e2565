#include "netorch/pipeline.hpp"

namespace netorch {

ChatTurnResult run_chat_query(const std::string& query,
                              const std::optional<Json>& payload,
                              const Registry& registry,
                              const PlannerOptions& planner_options,
                              MemoryStore* memory) {
  PlannerOptions options = planner_options;
  options.registry = &registry;

  ChatTurnResult result;
  result.plan = plan_query(query, payload, options);
  result.trace = execute_plan(result.plan, registry);
  result.response = compose_response(result.trace);
  if (memory != nullptr) {
    result.record_id =
        memory->store_record(query, canonical_dump(result.plan.to_json()),
                             result.response.summary_text, result.response.metrics);
  }
  return result;
}

Json build_payload_from_scenario(const Scenario& scenario,
                                 const PayloadOptions& options) {
  const PowerProblem power = scenario_to_power_problem(scenario, options.p_max);
  // total_bw is a per-query quantity; only the per-UE gains are reused here.
  const BandwidthProblem bandwidth = scenario_to_bandwidth_problem(
      scenario, options.cell, /*total_bw=*/1.0, options.per_ue_power, options.n0);
  return Json{
      {"cross_gain", power.cross_gain},
      {"gains", bandwidth.effective_snr},
      {"noise", power.noise},
      {"p_max", power.p_max},
      {"signal_gain", power.signal_gain},
      {"total_power", options.p_max},
  };
}

}  // namespace netorch
