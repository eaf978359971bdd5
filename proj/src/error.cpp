#include "horolab/error.hpp"

namespace horolab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::IterationCap: return "IterationCap";
    case ErrorCode::DegenerateHorocycle: return "DegenerateHorocycle";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
    case ErrorCode::GcdViolation: return "GcdViolation";
    case ErrorCode::NegativeSequence: return "NegativeSequence";
    case ErrorCode::LimitTooLarge: return "LimitTooLarge";
    case ErrorCode::NonInvertible: return "NonInvertible";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace horolab
