#pragma once

#include <stdexcept>
#include <string>

namespace sgdlab {

// Malformed input data (bad spectrum entries, inconsistent lengths, bad config).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The exact oracle only covers Gaussian features.
class UnsupportedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, double gamma)
      : std::runtime_error("SGD diverged at t=" + std::to_string(step) +
                           " (gamma_t=" + std::to_string(gamma) + ")"),
        step_(step),
        gamma_(gamma) {}

  long step() const noexcept { return step_; }
  double gamma() const noexcept { return gamma_; }

 private:
  long step_;
  double gamma_;
};

}  // namespace sgdlab
