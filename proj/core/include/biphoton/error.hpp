#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Base class for all library failures that are not plain precondition
/// violations (those throw std::invalid_argument).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical refinement did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A statistical estimator has no meaningful value for the given data.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// A model was used outside the regime where it is valid.
class ModelValidityError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace biphoton
