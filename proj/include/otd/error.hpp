#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otd {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  non_convergence,
  singular_pencil,
  complex_spectrum,
  degenerate_spectrum,
  rank_deficient_components,
  probe_degenerate,
  attempts_exhausted,
  non_positive_singular_vector,
  rank_too_low,
  io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace otd
