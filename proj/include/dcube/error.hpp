#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dcube {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed caller input: bad dimensions, out-of-range ids, broken
// preconditions on raw data.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Text input that cannot be parsed. `line` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An enumeration would exceed the configured size cap.
class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

// A theorem hypothesis required by an operation does not hold.
class HypothesisUnmet : public Error {
 public:
  using Error::Error;
};

// Arithmetic overflow in exact integer computations.
class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcube
