#pragma once

#include <stdexcept>
#include <string>

namespace oeecast {

// Root of every error the library throws. The CLI maps each subclass onto a
// distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files or text (CSV cells, timestamps, config lines).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Singular systems, collinear regressors, failed fits.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace oeecast
