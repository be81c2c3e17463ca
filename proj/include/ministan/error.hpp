#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ministan {

enum class ErrorKind {
  Syntax,
  Scope,
  Redefinition,
  UnboundVariable,
  InvalidParameter,
  MissingVariable,
  OverlappingAssignment,
  NoSuchVariable,
  UnsupportedIntervention,
  InvalidFactor,
  InvalidValue,
  DegenerateWeights,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every domain failure in the library surfaces as this exception type.
/// `subject` is the variable, statement, or entity the error is about
/// (may be empty).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string subject, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorKind kind_;
  std::string subject_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace ministan
