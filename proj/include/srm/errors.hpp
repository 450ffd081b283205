#pragma once

#include <stdexcept>
#include <string>

namespace srm {

/// Probability or abscissa outside the domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Model parameter outside its admissible range (a <= 0, c outside (0,1), ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ill-formed input data: empty samples, non-numeric or non-finite records.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for failures of the numerical engines.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weight function evaluated at a point where it is infinite.
class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Adaptive integration exhausted its refinement budget.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_bound)
      : NumericError(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

}  // namespace srm
