#pragma once

#include <stdexcept>
#include <string>

namespace nlac {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or validation failure on user-supplied input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Quadrature, ODE or iterative-solver failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed manifest, snapshot or other on-disk data.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlac
