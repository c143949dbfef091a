#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdbayes {

// Base of every error thrown by the library. The CLI maps the subclasses
// onto exit codes: usage -> 1, data/validation -> 2, numerical -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad command-line usage or an unknown preset name.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input violates a documented precondition (empty cloud, variance <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that breaks a semantic invariant (death < birth, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A configured resource budget would be exceeded.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t required)
      : Error(what), required_(required) {}

  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Rejection sampler could not produce a draw within its proposal budget.
class SamplingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pdbayes
