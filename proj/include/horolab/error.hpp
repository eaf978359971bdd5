#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace horolab {

enum class ErrorCode {
  InvalidArgument,
  PreconditionViolated,
  IterationCap,
  DegenerateHorocycle,
  BudgetTooSmall,
  EmptyIndexSet,
  GcdViolation,
  NegativeSequence,
  LimitTooLarge,
  NonInvertible,
  ParseError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) fail(code, message);
}

}  // namespace horolab
