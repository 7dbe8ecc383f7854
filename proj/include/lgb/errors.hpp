#pragma once

#include <stdexcept>
#include <string>

namespace lgb {

/// Malformed or inconsistent input (files, schemas, masks, parameters).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The requested (k, l) cannot be met by the data, e.g. a sensitive value
/// too frequent for l buckets or a signature class smaller than k.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lgb
