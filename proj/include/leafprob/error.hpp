#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leafprob {

enum class ErrorKind {
  // input validation
  KraftViolation,
  BadProbability,
  DuplicateLeaf,
  InvalidLabel,
  ParseError,
  TreeMismatch,
  NotFixedLength,
  DomainError,
  NonFiniteFunctional,
  MappingNotTotal,
  StochasticMappingSupplied,
  DeterministicMappingSupplied,
  PeExceedsCap,
  SearchSpaceTooLarge,
  // a checked identity or bound failed
  MonotonicityViolation,
  InvariantViolation,
  BoundViolation,
};

std::string_view to_string(ErrorKind kind);

/// True for kinds that signal a failed internal check rather than bad input.
bool is_violation(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace leafprob
