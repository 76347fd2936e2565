#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netorch/errors.hpp"

namespace netorch {

using Json = nlohmann::json;

// Dense row-major matrix. This is the only matrix representation in the
// project; solver hot loops index it directly and the JSON form is pinned
// to {"rows": r, "cols": c, "data": [row-major]}.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool operator==(const Matrix& other) const = default;
};

void to_json(Json& j, const Matrix& m);
Matrix matrix_from_json(const Json& j);
inline void from_json(const Json& j, Matrix& m) { m = matrix_from_json(j); }

// Serializes with sorted object keys, no whitespace, and shortest
// round-trip number formatting, so equal values always produce equal
// bytes. Rejects NaN/Inf (they have no JSON representation and would
// otherwise serialize as null and break the decode/encode round trip).
std::string canonical_dump(const Json& j);

// Shortest decimal representation that parses back to exactly the same
// double; the same formatting canonical_dump uses. CSV output reuses it.
std::string format_double(double x);

// Strict parse: raises Error(kParseError) with the parser's position
// message instead of nlohmann's exception type.
Json parse_json(const std::string& text, const std::string& what);

}  // namespace netorch
