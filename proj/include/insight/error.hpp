#pragma once

#include <stdexcept>
#include <string>

namespace insight {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input file, schema, or configuration. The CLI maps this to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on data that violates its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A model could not be fitted on the given data.
class MiningError : public Error {
 public:
  using Error::Error;
};

}  // namespace insight
