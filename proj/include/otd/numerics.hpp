#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "otd/tensor.hpp"

namespace otd {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct SvdResult {
  Matrix left;             // rows x rows, orthonormal
  Vector singular_values;  // nonincreasing, length min(rows, cols)
  Matrix right;            // cols x cols, orthonormal
};

struct EigResult {
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;  // unit 2-norm columns
};

/// Full SVD. Throws non_convergence if the backend reports failure.
SvdResult svd(const Matrix& m);

/// Eigenpairs of a real square matrix. Each eigenvector is scaled to unit
/// 2-norm with its first non-negligible entry real and positive.
EigResult eig_nonsymmetric(const Matrix& m);

/// Default relative rank cutoff: max(rows, cols) * machine epsilon.
double default_rank_tol(const Matrix& m);

/// Moore-Penrose pseudoinverse; singular values below rank_tol * sigma_1 are
/// treated as zero.
Matrix pseudoinverse(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

struct SingularPair {
  double sigma_min;
  Vector right_vector;
};

/// Smallest singular value and a unit right singular vector for it.
SingularPair min_singular_pair(const Matrix& m);

/// Scales `v` so that its first entry with |v_i| > tol * max|v| is positive.
void canonicalize_sign(Eigen::Ref<Vector> v);

}  // namespace otd
