#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symtest {

// Base of every error raised by the library. Callers that only care about
// "something went wrong in symtest" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

// Covariance (or any matrix passed to inv_sqrt) has an eigenvalue at or below
// the positive-definiteness floor.
class SingularCovariance : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed user input (CSV cells, suite files). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace symtest
