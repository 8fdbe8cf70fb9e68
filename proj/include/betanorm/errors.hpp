#pragma once

#include <stdexcept>
#include <string>

namespace betanorm {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative method stopped before meeting its tolerance. Carries whatever
// it had when it gave up.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate,
                   double error_bound, int iterations)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_bound_(error_bound),
        iterations_(iterations) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_estimate_;
  double error_bound_;
  int iterations_;
};

// A coefficient recurrence that would divide by zero.
class DegenerateRecurrenceError : public DomainError {
 public:
  DegenerateRecurrenceError(const std::string& what, int index)
      : DomainError(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

// Value not representable in double (e.g. a survival function below 1e-300).
class OverflowError : public DomainError {
 public:
  using DomainError::DomainError;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A value paired with an estimate of its absolute error.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

}  // namespace betanorm
