#include "ministan/error.hpp"

namespace ministan {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Scope: return "ScopeError";
    case ErrorKind::Redefinition: return "RedefinitionError";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::MissingVariable: return "MissingVariable";
    case ErrorKind::OverlappingAssignment: return "OverlappingAssignment";
    case ErrorKind::NoSuchVariable: return "NoSuchVariable";
    case ErrorKind::UnsupportedIntervention: return "UnsupportedIntervention";
    case ErrorKind::InvalidFactor: return "InvalidFactor";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::DegenerateWeights: return "DegenerateWeights";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, std::string subject, const std::string& message)
    : std::runtime_error(message), kind_(kind), subject_(std::move(subject)) {}

SyntaxError::SyntaxError(std::size_t line, std::size_t column,
                         const std::string& message)
    : Error(ErrorKind::Syntax, "",
            std::to_string(line) + ":" + std::to_string(column) + ": " +
                message),
      line_(line),
      column_(column) {}

}  // namespace ministan
