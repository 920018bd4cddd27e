#include "otd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "otd/error.hpp"

namespace otd {

namespace {

constexpr double kSignTol = 1e-12;

void require_finite(const Matrix& m, const char* op) {
  require(m.allFinite(), ErrorCode::invalid_argument, std::string(op) + ": non-finite input");
}

}  // namespace

void canonicalize_sign(Eigen::Ref<Vector> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > kSignTol * scale) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  require(m.rows() > 0 && m.cols() > 0, ErrorCode::invalid_argument, "svd: empty matrix");
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  require(solver.info() == Eigen::Success, ErrorCode::non_convergence, "svd did not converge");
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

EigResult eig_nonsymmetric(const Matrix& m) {
  require_finite(m, "eig");
  require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::dimension_mismatch, "eig: matrix must be square");
  Eigen::EigenSolver<Matrix> solver(m, true);
  require(solver.info() == Eigen::Success, ErrorCode::non_convergence, "eigendecomposition did not converge");

  EigResult out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    const double norm = col.norm();
    if (norm == 0.0) continue;
    col /= norm;
    const double scale = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      const double mag = std::abs(col(i));
      if (mag > kSignTol * scale) {
        col *= std::conj(col(i)) / mag;  // rotate phase so entry i is real positive
        col(i) = std::complex<double>(mag, 0.0);
        break;
      }
    }
  }
  return out;
}

double default_rank_tol(const Matrix& m) {
  return static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon();
}

Matrix pseudoinverse(const Matrix& m, std::optional<double> rank_tol) {
  const double tol = rank_tol.value_or(default_rank_tol(m));
  require(tol > 0.0, ErrorCode::invalid_argument, "pseudoinverse: rank_tol must be positive");
  const SvdResult s = svd(m);
  const Eigen::Index k = s.singular_values.size();
  const double cutoff = tol * (k > 0 ? s.singular_values(0) : 0.0);
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < k; ++i) {
    const double sigma = s.singular_values(i);
    if (sigma <= cutoff || sigma == 0.0) break;
    out += (s.right.col(i) / sigma) * s.left.col(i).transpose();
  }
  return out;
}

SingularPair min_singular_pair(const Matrix& m) {
  const SvdResult s = svd(m);
  // For wide matrices the trailing right singular vectors span the null space.
  const Eigen::Index last = m.cols() - 1;
  const double sigma = last < s.singular_values.size() ? s.singular_values(last) : 0.0;
  Vector v = s.right.col(last);
  v.normalize();
  return {sigma, v};
}

}  // namespace otd
