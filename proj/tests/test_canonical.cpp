#include "netorch/canonical.hpp"

#include <cmath>
#include <limits>

#include "doctest.h"
#include "test_support.hpp"

using namespace netorch;
using test_support::expect_error;

TEST_CASE("canonical_dump sorts keys and strips whitespace") {
  const Json j = Json::parse(R"({"zeta": 1, "alpha": {"b": 2, "a": 3}, "mid": [1, 2]})");
  CHECK(canonical_dump(j) == R"({"alpha":{"a":3,"b":2},"mid":[1,2],"zeta":1})");
}

TEST_CASE("canonical_dump is stable under re-parsing") {
  const Json j = Json::parse(R"({"x": 0.1, "y": [1e-3, 123456789.123456789], "s": "t"})");
  const std::string once = canonical_dump(j);
  CHECK(canonical_dump(Json::parse(once)) == once);
}

TEST_CASE("canonical_dump rejects non-finite numbers anywhere in the tree") {
  Json nan_leaf = Json{{"a", std::nan("")}};
  expect_error([&] { canonical_dump(nan_leaf); }, ErrorCode::kEnvelopeParseError);
  Json inf_nested = Json{{"a", Json::array({1.0, std::numeric_limits<double>::infinity()})}};
  expect_error([&] { canonical_dump(inf_nested); }, ErrorCode::kEnvelopeParseError);
}

TEST_CASE("format_double survives a parse round trip") {
  for (double x : {0.0, -0.0, 0.1, 1.0 / 3.0, 1e-300, 1e300, 123456789.123456789,
                   -2.2250738585072014e-308}) {
    CAPTURE(x);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("matrix JSON form is pinned") {
  Matrix m(2, 3);
  for (std::size_t i = 0; i < 6; ++i) m.data[i] = static_cast<double>(i + 1);
  CHECK(canonical_dump(Json(m)) ==
        R"({"cols":3,"data":[1.0,2.0,3.0,4.0,5.0,6.0],"rows":2})");
  CHECK(matrix_from_json(Json(m)) == m);
}

TEST_CASE("matrix_from_json is strict") {
  expect_error([] { matrix_from_json(Json::parse(R"({"rows":2,"cols":3})")); },
               ErrorCode::kEnvelopeParseError);
  expect_error(
      [] { matrix_from_json(Json::parse(R"({"rows":2,"cols":3,"data":[1,2,3]})")); },
      ErrorCode::kEnvelopeParseError);
  expect_error(
      [] {
        matrix_from_json(Json::parse(R"({"rows":1,"cols":1,"data":[1],"extra":0})"));
      },
      ErrorCode::kEnvelopeParseError);
  expect_error(
      [] { matrix_from_json(Json::parse(R"({"rows":1,"cols":1,"data":["x"]})")); },
      ErrorCode::kEnvelopeParseError);
  expect_error([] { matrix_from_json(Json::parse("[1,2,3]")); },
               ErrorCode::kEnvelopeParseError);
}

TEST_CASE("parse_json reports the failing input by name") {
  expect_error([] { parse_json("{not json", "settings.json"); }, ErrorCode::kParseError);
  try {
    parse_json("{", "settings.json");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("settings.json") != std::string::npos);
  }
}
