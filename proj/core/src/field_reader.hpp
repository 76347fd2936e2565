#pragma once

#include <set>
#include <string>

#include "netorch/canonical.hpp"
#include "netorch/errors.hpp"

namespace netorch {

// Strict object access for the pinned file formats: every field fetched
// through get() is required, and reject_unknown() refuses anything else.
class FieldReader {
 public:
  FieldReader(const Json& obj, std::string context,
              ErrorCode code = ErrorCode::kParseError)
      : obj_(obj), context_(std::move(context)), code_(code) {
    if (!obj.is_object()) {
      throw Error(code_, context_ + " must be a JSON object");
    }
  }

  const Json& get(const char* name) {
    auto it = obj_.find(name);
    if (it == obj_.end()) {
      throw Error(code_, context_ + " is missing field '" + name + "'");
    }
    seen_.insert(name);
    return *it;
  }

  const Json* get_optional(const char* name) {
    auto it = obj_.find(name);
    if (it == obj_.end()) return nullptr;
    seen_.insert(name);
    return &*it;
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw Error(code_, context_ + " has unknown field '" + it.key() + "'");
      }
    }
  }

 private:
  const Json& obj_;
  std::string context_;
  ErrorCode code_;
  std::set<std::string> seen_;
};

inline std::string require_string(const Json& j, const std::string& what,
                                  ErrorCode code = ErrorCode::kParseError) {
  if (!j.is_string()) throw Error(code, what + " must be a string");
  return j.get<std::string>();
}

inline double require_number(const Json& j, const std::string& what,
                             ErrorCode code = ErrorCode::kParseError) {
  if (!j.is_number()) throw Error(code, what + " must be a number");
  return j.get<double>();
}

}  // namespace netorch
