#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "netorch/errors.hpp"

namespace test_support {

// Runs f expecting a netorch::Error with exactly this code; failure output
// names codes instead of integers.
template <typename F>
void expect_error(F&& f, netorch::ErrorCode code) {
  try {
    f();
    FAIL_CHECK("expected " << netorch::error_code_name(code) << ", nothing thrown");
  } catch (const netorch::Error& e) {
    CHECK_MESSAGE(e.code() == code, "expected " << netorch::error_code_name(code)
                                                << ", got \"" << e.what() << "\"");
  }
}

class TempDir {
 public:
  TempDir() {
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 1000; ++attempt) {
      auto candidate = base / ("netorch_test_" + std::to_string(::getpid()) + "_" +
                               std::to_string(counter_++));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create a temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(static_cast<bool>(in), "cannot open " << path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  REQUIRE_MESSAGE(static_cast<bool>(out), "cannot write " << path);
  out << text;
}

}  // namespace test_support

// The suites are standalone binaries; unqualified helper names keep the
// test bodies readable.
using test_support::TempDir;
using test_support::expect_error;
using test_support::read_file;
using test_support::write_file;
