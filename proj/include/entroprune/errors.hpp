#pragma once

#include <stdexcept>
#include <string>

namespace entroprune {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed archive header or JSON.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Archive payload inconsistent with its header (truncation, overlap, misalignment).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A query's attention mass on patch keys is numerically zero.
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

/// Rényi order outside (0, 1) ∪ (1, ∞).
class InvalidOrderError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unsupported or truncated image file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

}  // namespace entroprune
