#pragma once

#include <stdexcept>
#include <string>

namespace trotterkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation's precondition (bad shape, negative time, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two measures or an operator and a measure live on different state spaces.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated at a point outside its finite domain.
class MissingPoint : public Error {
 public:
  using Error::Error;
};

/// A numeric object failed its structural check (non-stochastic matrix, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Scenario or measure file could not be parsed or validated.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace trotterkit
