#include "netorch/selector.hpp"

#include <algorithm>
#include <cmath>

#include "netorch/embedding.hpp"
#include "netorch/errors.hpp"

namespace netorch {

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine_similarity: " + std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()));
  }
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) return 0.0;
  return dot / std::sqrt(nu * nv);
}

std::vector<RankedCandidate> rank_models(const Registry& registry,
                                         TaskType task_type,
                                         Objective objective,
                                         const std::string& query_text,
                                         std::size_t top_n) {
  if (top_n < 1) {
    throw Error(ErrorCode::kInvalidProblem, "rank_models: top_n must be >= 1");
  }
  std::vector<const ModelDescriptor*> pool = registry.list_models(task_type);
  bool any_objective_match = std::any_of(
      pool.begin(), pool.end(),
      [&](const ModelDescriptor* d) { return d->objective == objective; });
  if (any_objective_match) {
    std::erase_if(pool, [&](const ModelDescriptor* d) { return d->objective != objective; });
  }

  const EmbeddingVector query = embed_text(query_text);
  std::vector<RankedCandidate> ranked;
  ranked.reserve(pool.size());
  for (const ModelDescriptor* d : pool) {
    ranked.push_back({d->model_id,
                      netorch::cosine_similarity(embed_text(d->description), query), 0});
  }
  // pool is already in model_id order; stable_sort keeps that as the final
  // tie-break after score and download_count.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const RankedCandidate& a, const RankedCandidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return registry.find(a.model_id)->download_count >
                            registry.find(b.model_id)->download_count;
                   });
  if (ranked.size() > top_n) ranked.resize(top_n);
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = static_cast<int>(i) + 1;
  return ranked;
}

}  // namespace netorch
