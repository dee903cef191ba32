#pragma once

#include <stdexcept>
#include <string>

namespace calr {

/// Invalid configuration or input data (CLI exit code 1).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a map or evaluator.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical failure inside a solver (CLI exit code 2).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int order = -1)
      : std::runtime_error(what), order_(order) {}
  /// Offending mode order, or -1 when not mode specific.
  int order() const { return order_; }

 private:
  int order_;
};

/// The plasmonic mode system degenerates (delta = 0 or numerically singular).
class ResonanceSingular : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace calr
