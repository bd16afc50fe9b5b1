#pragma once

#include <stdexcept>
#include <string>

namespace matterhorn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the representable range (codes, bit budgets).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions or time windows disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A configuration parameter is invalid (non-positive scale, bad window).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An element has a value the operation does not accept (e.g. a non ±1 weight).
class ValueError : public Error {
 public:
  using Error::Error;
};

/// A required setting is missing or malformed in a loaded configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The caller invoked an operation without meeting its usage contract.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace matterhorn
