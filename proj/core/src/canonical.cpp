#include "netorch/canonical.hpp"

#include <cmath>

namespace netorch {

void to_json(Json& j, const Matrix& m) {
  j = Json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_object() || j.size() != 3 || !j.contains("rows") ||
      !j.contains("cols") || !j.contains("data")) {
    throw Error(ErrorCode::kEnvelopeParseError,
                "matrix must be an object with exactly rows, cols, data");
  }
  const Json& rows = j.at("rows");
  const Json& cols = j.at("cols");
  const Json& data = j.at("data");
  if (!rows.is_number_unsigned() || !cols.is_number_unsigned()) {
    throw Error(ErrorCode::kEnvelopeParseError,
                "matrix rows/cols must be non-negative integers");
  }
  if (!data.is_array()) {
    throw Error(ErrorCode::kEnvelopeParseError, "matrix data must be an array");
  }
  Matrix m;
  m.rows = rows.get<std::size_t>();
  m.cols = cols.get<std::size_t>();
  m.data.reserve(data.size());
  for (const Json& v : data) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kEnvelopeParseError, "matrix data must be numeric");
    }
    m.data.push_back(v.get<double>());
  }
  if (m.data.size() != m.rows * m.cols) {
    throw Error(ErrorCode::kEnvelopeParseError,
                "matrix data length does not match rows*cols");
  }
  return m;
}

namespace {

void check_finite(const Json& j) {
  switch (j.type()) {
    case Json::value_t::number_float:
      if (!std::isfinite(j.get<double>())) {
        throw Error(ErrorCode::kEnvelopeParseError,
                    "non-finite number has no canonical JSON form");
      }
      break;
    case Json::value_t::array:
    case Json::value_t::object:
      for (const Json& child : j) check_finite(child);
      break;
    default:
      break;
  }
}

}  // namespace

std::string canonical_dump(const Json& j) {
  // nlohmann::json's default object storage is std::map, so keys are
  // already sorted; dump() emits no whitespace and shortest round-trip
  // numbers. Canonicality therefore only needs the finiteness check.
  check_finite(j);
  return j.dump();
}

std::string format_double(double x) {
  return canonical_dump(Json(x));
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, what + ": " + e.what());
  }
}

}  // namespace netorch
