#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "netorch/canonical.hpp"
#include "netorch/executor.hpp"
#include "netorch/memory.hpp"
#include "netorch/planner.hpp"
#include "netorch/registry.hpp"
#include "netorch/simenv.hpp"

namespace netorch {

// Everything one coordinator turn produced, in pipeline order.
struct ChatTurnResult {
  Plan plan;
  ExecutionTrace trace;
  ResponseDocument response;
  int64_t record_id = -1;  // -1 when no memory store was attached
};

// One full turn: plan the query, execute against the registry, compose the
// response, and (when memory is non-null) archive the interaction. This is
// the exact path the interactive CLI session runs per query, factored out
// so batch runs and end-to-end tests hit identical code.
ChatTurnResult run_chat_query(const std::string& query,
                              const std::optional<Json>& payload,
                              const Registry& registry,
                              const PlannerOptions& planner_options,
                              MemoryStore* memory = nullptr);

struct PayloadOptions {
  double p_max = 1000.0;         // per-BS budget, noise-normalized
  double per_ue_power = 1000.0;  // transmit power behind the bandwidth gains
  double n0 = 1.0;               // noise density of the bandwidth rate model
  std::size_t cell = 0;          // cell described by the single-cell fields
};

// Flattens a scenario into the slot fields the planner knows how to
// attach: multi-cell power fields (signal_gain, cross_gain, noise, p_max)
// plus single-cell fields for bandwidth and water-filling tasks (gains,
// total_power). Tasks only pick up the fields their type declares, so one
// payload serves mixed-task queries.
Json build_payload_from_scenario(const Scenario& scenario,
                                 const PayloadOptions& options = {});

}  // namespace netorch
