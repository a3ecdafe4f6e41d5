#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gnls {

/// Caller violated a documented precondition (shape mismatch, out-of-range order, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrajectoryBlowUp : public NumericalError {
 public:
  explicit TrajectoryBlowUp(std::size_t node)
      : NumericalError("trajectory blow-up at node " + std::to_string(node)), node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

}  // namespace gnls
