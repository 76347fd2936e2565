#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "netorch/embedding.hpp"
#include "netorch/selector.hpp"
#include "test_support.hpp"

using namespace netorch;

namespace {

ModelDescriptor make_model(std::string id, TaskType task, Objective objective,
                           std::string description, uint64_t downloads) {
  ModelDescriptor d;
  d.model_id = std::move(id);
  d.task_type = task;
  d.objective = objective;
  d.description = std::move(description);
  d.download_count = downloads;
  return d;
}

}  // namespace

TEST_CASE("vector cosine basics") {
  using Vec = std::vector<double>;
  CHECK(cosine_similarity(Vec{1.0, 0.0}, Vec{0.0, 1.0}) == 0.0);
  CHECK(cosine_similarity(Vec{1.0, 2.0}, Vec{2.0, 4.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(Vec{1.0, 0.0}, Vec{-1.0, 0.0}) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(cosine_similarity(Vec{0.0, 0.0}, Vec{1.0, 1.0}) == 0.0);  // zero matches nothing
  expect_error([] { cosine_similarity(Vec{1.0}, Vec{1.0, 2.0}); },
               ErrorCode::kDimensionMismatch);
}

TEST_CASE("hand-computed ranking score") {
  // Query "beam" shares one of the description's two tokens and the buckets
  // do not collide, so cosine is exactly 1/sqrt(2).
  Registry r;
  r.register_model(make_model("beam_v1", TaskType::kBeamPrediction, Objective::kNone,
                              "beam prediction", 10));
  const auto ranked = rank_models(r, TaskType::kBeamPrediction, Objective::kNone, "beam", 5);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].model_id == "beam_v1");
  CHECK(ranked[0].rank == 1);
  CHECK(ranked[0].score == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("objective narrowing only applies when a match exists") {
  Registry r;
  r.register_model(make_model("maxmin_v1", TaskType::kPowerAllocation,
                              Objective::kMaxMinSinr, "max min power", 5));
  r.register_model(make_model("uniform_v1", TaskType::kPowerAllocation,
                              Objective::kUniformPower, "uniform power", 9));

  // Requested objective is present: pool narrows to exactly those models.
  auto ranked = rank_models(r, TaskType::kPowerAllocation, Objective::kMaxMinSinr, "power", 5);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].model_id == "maxmin_v1");

  // Requested objective is absent: the whole task-type pool stays eligible.
  ranked = rank_models(r, TaskType::kPowerAllocation, Objective::kWaterFilling, "power", 5);
  CHECK(ranked.size() == 2);

  // Other task types never leak in.
  ranked = rank_models(r, TaskType::kBandwidthAllocation, Objective::kMaxMinSinr, "power", 5);
  CHECK(ranked.empty());
}

TEST_CASE("ties break by download count, then model id") {
  Registry r;
  // Identical descriptions make every score equal.
  r.register_model(make_model("c_mid", TaskType::kBaseline, Objective::kNone, "same text", 50));
  r.register_model(make_model("a_low", TaskType::kBaseline, Objective::kNone, "same text", 10));
  r.register_model(make_model("b_top", TaskType::kBaseline, Objective::kNone, "same text", 90));
  r.register_model(make_model("d_low", TaskType::kBaseline, Objective::kNone, "same text", 10));

  const auto ranked = rank_models(r, TaskType::kBaseline, Objective::kNone, "same text", 10);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0].model_id == "b_top");
  CHECK(ranked[1].model_id == "c_mid");
  CHECK(ranked[2].model_id == "a_low");  // 10 downloads: id order decides
  CHECK(ranked[3].model_id == "d_low");
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(ranked[i].rank == static_cast<int>(i) + 1);
    CHECK(ranked[i].score == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("registration order cannot change the ranking") {
  auto models = std::vector<ModelDescriptor>{
      make_model("alpha", TaskType::kBaseline, Objective::kNone, "fast beam search", 3),
      make_model("bravo", TaskType::kBaseline, Objective::kNone, "beam search", 7),
      make_model("charlie", TaskType::kBaseline, Objective::kNone, "power control", 1),
  };

  Registry forward;
  for (const auto& m : models) forward.register_model(m);
  Registry backward;
  for (auto it = models.rbegin(); it != models.rend(); ++it) backward.register_model(*it);

  const std::string query = "beam search please";
  CHECK(rank_models(forward, TaskType::kBaseline, Objective::kNone, query, 10) ==
        rank_models(backward, TaskType::kBaseline, Objective::kNone, query, 10));
}

TEST_CASE("top_n truncates after sorting and is validated") {
  const Registry r = default_registry();
  const std::string query = "allocate power to help the worst user";

  const auto full = rank_models(r, TaskType::kPowerAllocation, Objective::kWaterFilling,
                                query, 100);
  REQUIRE(full.size() == 1);  // objective narrowing picked waterfilling_v1
  CHECK(full[0].model_id == "waterfilling_v1");

  // No objective filter (kNone matches nothing): all four power models rank.
  const auto pool = rank_models(r, TaskType::kPowerAllocation, Objective::kNone, query, 100);
  REQUIRE(pool.size() == 4);
  const auto top2 = rank_models(r, TaskType::kPowerAllocation, Objective::kNone, query, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0] == pool[0]);
  CHECK(top2[1] == pool[1]);

  expect_error([&] { rank_models(r, TaskType::kPowerAllocation, Objective::kNone, query, 0); },
               ErrorCode::kInvalidProblem);
}

TEST_CASE("scores agree with a direct embedding computation") {
  const Registry r = default_registry();
  const std::string query = "maximize the minimum sinr across cells";
  const auto ranked =
      rank_models(r, TaskType::kPowerAllocation, Objective::kMaxMinSinr, query, 5);
  REQUIRE(ranked.size() == 1);
  const ModelDescriptor* d = r.find("maxmin_power_v1");
  REQUIRE(d != nullptr);
  const double expected =
      netorch::cosine_similarity(embed_text(d->description), embed_text(query));
  CHECK(ranked[0].score == doctest::Approx(expected).epsilon(1e-15));
  CHECK(ranked[0].score > 0.0);
}
