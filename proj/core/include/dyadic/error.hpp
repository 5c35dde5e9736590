#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dyadic {

enum class ErrorCode {
  Schema,
  Io,
  EmptyCorpus,
  OutOfRangeItem,
  DimensionMismatch,
  RoleConflict,
  CoupleMismatch,
  MissingPartner,
  EmptyDesignMatrix,
  SingleClassInput,
  NonConvergence,
  TooFewGroups,
  UndefinedRecall,
  DegenerateInner,
  InvalidParams,
  Config,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

// Base for every error raised by the library. The code lets callers (the CLI
// in particular) map failures onto exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Feature-file validation failure. `line` is 1-based; 0 means "not tied to a line".
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, double residual)
      : Error(ErrorCode::NonConvergence, message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace dyadic
