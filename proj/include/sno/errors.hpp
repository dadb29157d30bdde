#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sno {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text, problem file, or command-line value.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_ = 0;
};

/// Evaluation outside the domain of a unary function, or division by zero.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InfeasiblePointError : public Error {
 public:
  using Error::Error;
};

/// SNO-LICQ fails, so multipliers are not unique.
class LicqError : public Error {
 public:
  using Error::Error;
};

/// Requested operation has no implementation for the given cone or dimension.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace sno
