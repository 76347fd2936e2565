#pragma once

#include <array>
#include <string_view>

namespace netorch {

// Feature-hashing bag-of-words vector. 256 buckets is plenty for the
// registry-description vocabulary while keeping records compact; the L2
// norm is 1 unless the text had no tokens at all.
constexpr std::size_t kEmbeddingDim = 256;
using EmbeddingVector = std::array<double, kEmbeddingDim>;

// Tokenizes into lowercase maximal ASCII-alphanumeric runs, buckets each
// token by FNV-1a 64 mod 256, counts, and L2-normalizes. Deterministic
// across platforms (no locale, no std::hash).
EmbeddingVector embed_text(std::string_view text);

// Cosine of two equal-length vectors; 0 whenever either vector is zero
// (an unembeddable query simply matches nothing).
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace netorch
