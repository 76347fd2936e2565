#include <cmath>
#include <set>

#include "doctest.h"
#include "netorch/embedding.hpp"
#include "netorch/rng.hpp"
#include "test_support.hpp"

using namespace netorch;

namespace {

double norm(const EmbeddingVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::set<std::size_t> nonzero_buckets(const EmbeddingVector& v) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) out.insert(i);
  }
  return out;
}

}  // namespace

TEST_CASE("fnv1a64 matches the published reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("token buckets are fixed by the hash") {
  CHECK(fnv1a64("beam") % kEmbeddingDim == 26);
  CHECK(fnv1a64("power") % kEmbeddingDim == 230);
  CHECK(fnv1a64("bandwidth") % kEmbeddingDim == 210);
  CHECK(fnv1a64("prediction") % kEmbeddingDim == 68);
}

TEST_CASE("SplitMix64 streams are reproducible") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  SplitMix64 c(42), d(43);
  bool all_equal = true;
  for (int i = 0; i < 10; ++i) all_equal = all_equal && (c.next() == d.next());
  CHECK_FALSE(all_equal);
}

TEST_CASE("SplitMix64 uniform draws stay in range") {
  SplitMix64 rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 20000.0 - 0.5) < 0.02);

  SplitMix64 rng2(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng2.uniform_pos();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("substreams are independent of draw order") {
  // Drawing more from one substream must not shift another one.
  SplitMix64 ue0_a = substream(9, "ue_pos", 0);
  (void)ue0_a.next();
  (void)ue0_a.next();
  SplitMix64 ue1_a = substream(9, "ue_pos", 1);
  const uint64_t first_of_ue1 = ue1_a.next();

  SplitMix64 ue1_b = substream(9, "ue_pos", 1);
  CHECK(ue1_b.next() == first_of_ue1);

  // Distinct purposes and indices give distinct streams.
  CHECK(substream(9, "ue_pos", 0).next() != substream(9, "shadowing", 0).next());
  CHECK(substream(9, "ue_pos", 0).next() != substream(9, "ue_pos", 1).next());
  CHECK(substream(9, "ue_pos", 0).next() != substream(10, "ue_pos", 0).next());
}

TEST_CASE("embed_text of empty or tokenless input is the zero vector") {
  for (const char* text : {"", "   ", "!!! ---", "\t\n"}) {
    CAPTURE(text);
    CHECK(norm(embed_text(text)) == 0.0);
  }
}

TEST_CASE("embed_text is a unit-norm bag of words") {
  const EmbeddingVector v = embed_text("Allocate bandwidth for twenty users");
  CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-9));

  // Order invariance: same multiset of tokens, same vector.
  CHECK(embed_text("beam prediction") == embed_text("prediction beam"));
  CHECK(embed_text("Beam, prediction!") == embed_text("beam prediction"));

  // Token multiplicity matters.
  CHECK(embed_text("beam beam prediction") != embed_text("beam prediction"));
}

TEST_CASE("tokenization is lowercase alphanumeric runs") {
  // "UE-5" splits into "ue" and "5"; punctuation never reaches the hash.
  CHECK(embed_text("UE-5") == embed_text("ue 5"));
  CHECK(embed_text("max-min") == embed_text("max min"));
}

TEST_CASE("disjoint vocabularies have cosine zero") {
  CHECK(cosine_similarity(embed_text("beam"), embed_text("power")) == 0.0);
}

TEST_CASE("overlap oracle: one shared token out of two") {
  // cos( e("beam prediction"), e("beam") ) = (1/sqrt(2)) exactly, since the
  // two tokens land in distinct buckets.
  const double score = cosine_similarity(embed_text("beam prediction"), embed_text("beam"));
  CHECK(score == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("embedding digest: a fixed sentence pins its buckets") {
  const EmbeddingVector v =
      embed_text("optimize power allocation for the worst user");
  // Tokens: optimize, power, allocation, for, the, worst, user -- 7 distinct
  // tokens, so 7 equal-weight buckets of 1/sqrt(7).
  const std::set<std::size_t> buckets = nonzero_buckets(v);
  CHECK(buckets.size() == 7);
  CHECK(buckets.contains(230));  // "power"
  for (std::size_t i : buckets) {
    CHECK(v[i] == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-12));
  }
}
