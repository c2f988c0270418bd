#pragma once

#include <stdexcept>
#include <string>

namespace otl {

enum class ErrorKind {
  Validation,  // an input violates a documented invariant
  Solver,      // a numerical kernel failed to produce a certified answer
  Io,          // a file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::Validation, message) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& message)
      : Error(ErrorKind::Solver, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorKind::Io, message) {}
};

}  // namespace otl
