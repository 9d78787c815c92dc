#ifndef PQNET_ERRORS_HPP
#define PQNET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pqnet {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model validation. All three derive from ModelError so callers can map the
// whole family to one exit status.
class ModelError : public Error {
 public:
  using Error::Error;
};
class DimensionMismatch : public ModelError {
 public:
  using ModelError::ModelError;
};
class NonPositiveRate : public ModelError {
 public:
  using ModelError::ModelError;
};
class NegativeServiceRate : public ModelError {
 public:
  using ModelError::ModelError;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};
class InfeasibleModel : public Error {
 public:
  using Error::Error;
};
class GenerationFailed : public Error {
 public:
  using Error::Error;
};
class NotATree : public Error {
 public:
  using Error::Error;
};
class ScalingViolation : public Error {
 public:
  using Error::Error;
};
class PolicyViolation : public Error {
 public:
  using Error::Error;
};
// A policy cannot be built for the given model (e.g. no negative path).
class PolicyNotApplicable : public Error {
 public:
  using Error::Error;
};

}  // namespace pqnet

#endif  // PQNET_ERRORS_HPP
