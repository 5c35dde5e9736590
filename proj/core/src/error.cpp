#include "dyadic/error.hpp"

namespace dyadic {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::OutOfRangeItem: return "OutOfRangeItem";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RoleConflict: return "RoleConflict";
    case ErrorCode::CoupleMismatch: return "CoupleMismatch";
    case ErrorCode::MissingPartner: return "MissingPartner";
    case ErrorCode::EmptyDesignMatrix: return "EmptyDesignMatrix";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::UndefinedRecall: return "UndefinedRecall";
    case ErrorCode::DegenerateInner: return "DegenerateInner";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Internal: return "InternalError";
  }
  return "UnknownError";
}

SchemaError::SchemaError(std::size_t line, const std::string& message)
    : Error(ErrorCode::Schema,
            line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

}  // namespace dyadic
