#include "netorch/embedding.hpp"

#include <cmath>
#include <string>

#include "netorch/rng.hpp"

namespace netorch {

namespace {

bool is_ascii_alnum(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_ascii_lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

}  // namespace

EmbeddingVector embed_text(std::string_view text) {
  EmbeddingVector v{};
  std::string token;
  double count = 0;
  auto flush = [&] {
    if (token.empty()) return;
    v[fnv1a64(token) % kEmbeddingDim] += 1.0;
    count += 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    if (is_ascii_alnum(c)) {
      token.push_back(to_ascii_lower(c));
    } else {
      flush();
    }
  }
  flush();
  if (count == 0) return v;
  double norm_sq = 0;
  for (double x : v) norm_sq += x * x;
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace netorch
