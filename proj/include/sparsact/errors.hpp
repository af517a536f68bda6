#pragma once

#include <stdexcept>
#include <string>

namespace sparsact {

// Thrown when an operation needs a controllable system or a full-rank
// Gramian and the argument does not provide one.
class NotControllableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Thrown when a scheduling algorithm's stated preconditions fail, naming
// the violated condition in the message.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative numeric routine fails to converge or a
// guaranteed-rank construction loses rank in floating point.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Thrown when the mean-square-error upper bound is requested outside its
// region of validity. Carries the smallest sparsity level that would make
// the bound finite, or -1 if no sparsity level does.
class BoundUndefinedError : public std::runtime_error {
public:
  BoundUndefinedError(const std::string& what, int required_sparsity)
      : std::runtime_error(what), required_sparsity_(required_sparsity) {}

  int required_sparsity() const { return required_sparsity_; }

private:
  int required_sparsity_;
};

}  // namespace sparsact
