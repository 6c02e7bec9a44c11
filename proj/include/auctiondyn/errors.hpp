#pragma once

#include <stdexcept>
#include <string>

namespace auctiondyn {

/// Invalid construction parameters or malformed configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Caller violated an API contract (wrong vector length, out-of-range input).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// An exhaustive scan or table build would exceed the configured budget.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// An allocation rule that must be monotone non-decreasing is not.
/// Carries the witnessing adjacent pair of own-bid indices.
class MonotonicityError : public std::runtime_error {
 public:
  MonotonicityError(const std::string& what, int lower_index, int upper_index)
      : std::runtime_error(what), lower_index(lower_index), upper_index(upper_index) {}
  int lower_index;
  int upper_index;
};

}  // namespace auctiondyn
