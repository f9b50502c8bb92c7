#pragma once

#include <stdexcept>
#include <string>

namespace bayesrank {

// Shapes that do not line up (k > min(p, m), X and Y row counts, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter outside its mathematical domain (nonpositive variance, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid experiment or sampler configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller asked for something the inputs cannot provide (e.g. a risk without truth).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A side condition of a bound was violated. `constraint()` names it.
class ConstraintError : public std::invalid_argument {
 public:
  ConstraintError(std::string constraint, const std::string& what)
      : std::invalid_argument(constraint + ": " + what),
        constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

// Factorization failure that survived the jitter ladder.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace bayesrank
