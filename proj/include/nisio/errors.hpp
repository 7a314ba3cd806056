#pragma once

#include <stdexcept>
#include <string>

namespace nisio {

/// Invalid input: a violated precondition, a malformed file, a bad config value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed quantity broke an invariant that holds for any correct
/// implementation (e.g. non-monotone dyadic iterates).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A computation would exceed its work budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nisio
