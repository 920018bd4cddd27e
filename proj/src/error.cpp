#include "otd/error.hpp"

namespace otd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_convergence: return "NonConvergence";
    case ErrorCode::singular_pencil: return "SingularPencil";
    case ErrorCode::complex_spectrum: return "ComplexSpectrum";
    case ErrorCode::degenerate_spectrum: return "DegenerateSpectrum";
    case ErrorCode::rank_deficient_components: return "RankDeficientComponents";
    case ErrorCode::probe_degenerate: return "ProbeDegenerate";
    case ErrorCode::attempts_exhausted: return "AttemptsExhausted";
    case ErrorCode::non_positive_singular_vector: return "NonPositiveSingularVector";
    case ErrorCode::rank_too_low: return "RankTooLow";
    case ErrorCode::io: return "IoError";
  }
  return "Unknown";
}

}  // namespace otd
