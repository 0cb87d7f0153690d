#pragma once

#include <stdexcept>
#include <string>

namespace fpwalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed word text or configuration syntax.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a measure-level rule
/// (probabilities, duplicates, reducedness).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Dense solve hit a (numerically) singular matrix.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpwalk
