#include "leafprob/error.hpp"

namespace leafprob {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::KraftViolation: return "KraftViolation";
    case ErrorKind::BadProbability: return "BadProbability";
    case ErrorKind::DuplicateLeaf: return "DuplicateLeaf";
    case ErrorKind::InvalidLabel: return "InvalidLabel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::TreeMismatch: return "TreeMismatch";
    case ErrorKind::NotFixedLength: return "NotFixedLength";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonFiniteFunctional: return "NonFiniteFunctional";
    case ErrorKind::MappingNotTotal: return "MappingNotTotal";
    case ErrorKind::StochasticMappingSupplied: return "StochasticMappingSupplied";
    case ErrorKind::DeterministicMappingSupplied: return "DeterministicMappingSupplied";
    case ErrorKind::PeExceedsCap: return "PeExceedsCap";
    case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::BoundViolation: return "BoundViolation";
  }
  return "Unknown";
}

bool is_violation(ErrorKind kind) {
  return kind == ErrorKind::MonotonicityViolation || kind == ErrorKind::InvariantViolation ||
         kind == ErrorKind::BoundViolation;
}

}  // namespace leafprob
