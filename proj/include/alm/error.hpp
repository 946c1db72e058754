#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace alm {

// Argument outside the domain of a model function (e.g. an age outside [18, 100]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Maximum-likelihood fit whose solution is not identified by the data.
class FitDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Covariance matrix that is not symmetric positive semidefinite.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration / input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimizer ran out of iterations. Carries the best iterate found so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_alpha,
                   double best_value, double residual)
      : std::runtime_error(what),
        best_alpha_(std::move(best_alpha)),
        best_value_(best_value),
        residual_(residual) {}

  const std::vector<double>& best_alpha() const noexcept { return best_alpha_; }
  double best_value() const noexcept { return best_value_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> best_alpha_;
  double best_value_;
  double residual_;
};

}  // namespace alm
