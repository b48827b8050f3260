#pragma once

#include <stdexcept>
#include <string>

namespace slca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied inconsistent arguments or configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Numerical failure (factorization, degenerate inputs).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Degenerate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File content does not follow the expected binary layout.
class BadFormat : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace slca
