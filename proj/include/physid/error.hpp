#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace physid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter vector length does not match the family, or state shape does not
// match body_count.
class ArityError : public Error {
 public:
  using Error::Error;
};

// Input outside an operation's domain (bad angle, non-positive timestep, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error("rollout diverged at step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Regression has no unique solution (zero or collinear regressors).
class IllPosedError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace physid
