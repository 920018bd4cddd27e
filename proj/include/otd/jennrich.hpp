#pragma once

#include <cstddef>

#include "otd/tensor.hpp"

namespace otd {

/// Numerical guards for the simultaneous diagonalization step.
struct SpectralTolerances {
  /// Largest accepted |imag(lambda)| relative to max |lambda|.
  double imag_tol = 1e-6;
  /// Largest accepted condition number of the projected M_lambda.
  double cond_cap = 1e12;
  /// Smallest accepted eigenvalue separation relative to max |lambda|.
  /// Coincident eigenvalues leave the eigenvectors undetermined.
  double gap_tol = 1e-10;
};

struct JennrichConfig {
  std::size_t rank = 1;
  SpectralTolerances tol;
};

/// Recovers `cfg.rank` directions shared by the column structure of two
/// matrices M_mu ~ A diag(mu) A^T and M_lambda ~ A diag(lambda) A^T.
///
/// Projects both onto the top-r left singular subspace W of M_mu, forms
/// (W^T M_mu W)(W^T M_lambda W)^{-1} and maps its eigenvectors back through W.
/// Output columns have unit norm and their first non-negligible entry positive.
///
/// Throws singular_pencil, complex_spectrum or degenerate_spectrum when the
/// pair does not determine the directions; callers retry with new probes.
ComponentMatrix diagonalize(const Matrix& m_mu, const Matrix& m_lambda, const JennrichConfig& cfg);

}  // namespace otd
