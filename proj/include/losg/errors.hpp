#pragma once

#include <stdexcept>
#include <string>

namespace losg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed a value outside an operation's domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A configuration or parameter bundle failed validation.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Integration or factorization produced non-finite values.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, int index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

  int index() const { return index_; }

 private:
  int index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace losg
