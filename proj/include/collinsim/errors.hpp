#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace collinsim {

/// Argument outside the mathematical domain of an operation (VIF < 1, p < 2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Cholesky factorization hit a non-positive pivot.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(std::size_t pivot, const std::string& what)
      : std::runtime_error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Scenario violates its invariants (too few observations, bad omit set, ...).
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Design matrix is rank deficient.
class SingularFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N <= k + 1: no residual degrees of freedom.
class InsufficientDfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double c_low, double pa_low,
                   double c_high, double pa_high)
      : std::runtime_error(what),
        c_low_(c_low), pa_low_(pa_low), c_high_(c_high), pa_high_(pa_high) {}
  double c_low() const noexcept { return c_low_; }
  double pa_low() const noexcept { return pa_low_; }
  double c_high() const noexcept { return c_high_; }
  double pa_high() const noexcept { return pa_high_; }

 private:
  double c_low_, pa_low_, c_high_, pa_high_;
};

/// A replicate failed inside a scenario; carries the offending sim_index.
class ReplicateError : public std::runtime_error {
 public:
  ReplicateError(std::size_t sim_index, const std::string& what)
      : std::runtime_error("replicate " + std::to_string(sim_index) + ": " + what),
        sim_index_(sim_index) {}
  std::size_t sim_index() const noexcept { return sim_index_; }

 private:
  std::size_t sim_index_;
};

/// Heatmap input does not form a full (n, vif) rectangle.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace collinsim
