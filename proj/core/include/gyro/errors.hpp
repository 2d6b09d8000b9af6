#pragma once

#include <stdexcept>
#include <string>

namespace gyro {

// Base of every error the library throws. Callers that only need to
// distinguish "bad input" from "the numerics failed" can catch the two
// intermediate classes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input or configuration does not satisfy a documented precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not converge or lost accuracy.
class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidStateError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class BracketError : public InputError {
 public:
  using InputError::InputError;
};

class StructuralError : public InputError {
 public:
  using InputError::InputError;
};

class CapacityError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedCaseError : public InputError {
 public:
  using InputError::InputError;
};

class StratumError : public InputError {
 public:
  using InputError::InputError;
};

class StepFailure : public NumericError {
 public:
  StepFailure(const std::string& what, long step_index = -1)
      : NumericError(what), step_index_(step_index) {}
  long step_index() const noexcept { return step_index_; }

 private:
  long step_index_;
};

class SmallDivisorError : public NumericError {
 public:
  using NumericError::NumericError;
};

class EstimationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ContinuationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DataError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace gyro
