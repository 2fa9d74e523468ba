#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcurves {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  zero_length_segment,
  trivial_path,
  parse_error,
  schema_error,
  input_too_large,
  density_violation,
  degenerate_fit,
  no_crossings,
  non_generic_input,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::zero_length_segment: return "zero_length_segment";
    case ErrorCode::trivial_path: return "trivial_path";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::schema_error: return "schema_error";
    case ErrorCode::input_too_large: return "input_too_large";
    case ErrorCode::density_violation: return "density_violation";
    case ErrorCode::degenerate_fit: return "degenerate_fit";
    case ErrorCode::no_crossings: return "no_crossings";
    case ErrorCode::non_generic_input: return "non_generic_input";
  }
  return "unknown";
}

/// Validation failures are caused by the caller's input; everything else is a
/// runtime signal raised by an algorithm on otherwise valid input.
constexpr bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::density_violation:
    case ErrorCode::degenerate_fit:
    case ErrorCode::no_crossings:
    case ErrorCode::non_generic_input:
      return false;
    default:
      return true;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace rcurves
