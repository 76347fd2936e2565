#pragma once

#include <string>
#include <vector>

#include "netorch/registry.hpp"

namespace netorch {

struct RankedCandidate {
  std::string model_id;
  double score = 0.0;  // cosine(embed(description), embed(query)) in [-1, 1]
  int rank = 0;        // 1-based, consecutive

  bool operator==(const RankedCandidate&) const = default;
};

// u.v/(|u||v|); 0.0 when either norm is 0. Raises DimensionMismatch.
double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

// Filters by task type, narrows to the requested objective when at least
// one candidate matches it (otherwise keeps the whole task-type pool, so a
// registry without e.g. a water-filling model still offers alternatives),
// scores by description/query cosine, and breaks ties by download_count
// then model_id. Deterministic: iteration is in model_id order, so registry
// permutation cannot change the result.
std::vector<RankedCandidate> rank_models(const Registry& registry,
                                         TaskType task_type,
                                         Objective objective,
                                         const std::string& query_text,
                                         std::size_t top_n);

}  // namespace netorch
