#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etaik {

// Raised when an operation is called outside its preconditions (dimension
// mismatch, non-unit quaternion, out-of-limit configuration, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or mismatched input file (robot model, dataset, model, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampling ran out of tries.
class NoFreeSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Motion planner exhausted its extension budget.
class PlanningFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training loss became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace etaik
