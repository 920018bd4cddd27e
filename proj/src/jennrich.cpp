#include "otd/jennrich.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "otd/error.hpp"
#include "otd/numerics.hpp"

namespace otd {

ComponentMatrix diagonalize(const Matrix& m_mu, const Matrix& m_lambda, const JennrichConfig& cfg) {
  const Eigen::Index d = m_mu.rows();
  require(m_mu.cols() == d && m_lambda.rows() == d && m_lambda.cols() == d, ErrorCode::dimension_mismatch,
          "diagonalize: M_mu and M_lambda must be square of equal size");
  require(cfg.rank >= 1 && static_cast<Eigen::Index>(cfg.rank) <= d, ErrorCode::invalid_argument,
          "diagonalize: rank must lie in [1, d], got " + std::to_string(cfg.rank));
  const auto r = static_cast<Eigen::Index>(cfg.rank);

  const SvdResult top = svd(m_mu);
  const Matrix w = top.left.leftCols(r);

  const Matrix projected_mu = w.transpose() * m_mu * w;
  const Matrix projected_lambda = w.transpose() * m_lambda * w;

  const Vector sigma = svd(projected_lambda).singular_values;
  const double smin = sigma(r - 1);
  require(smin > 0.0 && sigma(0) / smin <= cfg.tol.cond_cap, ErrorCode::singular_pencil,
          "projected M_lambda condition number exceeds cap");

  const Matrix pencil = projected_mu * projected_lambda.partialPivLu().inverse();
  const EigResult eig = eig_nonsymmetric(pencil);

  const double spectral_radius = eig.eigenvalues.cwiseAbs().maxCoeff();
  require(spectral_radius > 0.0, ErrorCode::degenerate_spectrum, "pencil has zero spectrum");
  for (Eigen::Index i = 0; i < r; ++i) {
    require(std::abs(eig.eigenvalues(i).imag()) <= cfg.tol.imag_tol * spectral_radius, ErrorCode::complex_spectrum,
            "eigenvalue with non-negligible imaginary part");
  }
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i + 1; j < r; ++j)
      require(std::abs(eig.eigenvalues(i).real() - eig.eigenvalues(j).real()) > cfg.tol.gap_tol * spectral_radius,
              ErrorCode::degenerate_spectrum, "repeated eigenvalue");

  Matrix directions = w * eig.eigenvectors.real();
  for (Eigen::Index c = 0; c < r; ++c) {
    auto col = directions.col(c);
    const double norm = col.norm();
    require(norm > 0.0, ErrorCode::degenerate_spectrum, "zero eigenvector");
    col /= norm;
    canonicalize_sign(col);
  }
  return ComponentMatrix(std::move(directions));
}

}  // namespace otd
