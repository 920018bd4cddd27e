#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace otd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Column set a_1..a_n in R^d, stored as a d x n matrix.
class ComponentMatrix {
 public:
  ComponentMatrix() = default;
  explicit ComponentMatrix(Matrix columns);

  static ComponentMatrix empty(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(columns_.rows()); }
  std::size_t count() const noexcept { return static_cast<std::size_t>(columns_.cols()); }

  const Matrix& matrix() const noexcept { return columns_; }
  Vector column(std::size_t i) const { return columns_.col(static_cast<Eigen::Index>(i)); }

  /// Columns [first, first + n).
  ComponentMatrix slice(std::size_t first, std::size_t n) const;
  /// Horizontal concatenation; dims must agree.
  ComponentMatrix append(const ComponentMatrix& other) const;

 private:
  Matrix columns_;
};

/// Dense symmetric d x d x d tensor, row-major (i,j,k) storage.
///
/// Construction averages the input over all six index permutations, so after
/// construction entries are bit-identical under any permutation of (i,j,k).
class SymTensor3 {
 public:
  SymTensor3() = default;
  SymTensor3(std::size_t dim, std::vector<double> entries);

  static SymTensor3 zeros(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return entries_[(i * dim_ + j) * dim_ + k];
  }
  std::span<const double> entries() const noexcept { return entries_; }

  double frobenius_norm() const;

  SymTensor3 operator+(const SymTensor3& other) const;
  SymTensor3 operator-(const SymTensor3& other) const;
  SymTensor3 operator*(double s) const;

 private:
  struct Trusted {};
  SymTensor3(Trusted, std::size_t dim, std::vector<double> entries)
      : dim_(dim), entries_(std::move(entries)) {}

  std::size_t dim_ = 0;
  std::vector<double> entries_;

  friend SymTensor3 from_components(const ComponentMatrix&, std::span<const double>);
};

/// sum_i scales[i] * a_i (x) a_i (x) a_i; an empty `scales` means all ones.
SymTensor3 from_components(const ComponentMatrix& a, std::span<const double> scales = {});
inline SymTensor3 from_components(const ComponentMatrix& a, const Vector& scales) {
  return from_components(a, std::span<const double>(scales.data(), static_cast<std::size_t>(scales.size())));
}

/// T_x: the d x d matrix with (j,k) entry sum_i T_ijk x_i.
Matrix contract(const SymTensor3& t, const Vector& x);

/// T(x, u, v) = sum_ijk T_ijk x_i u_j v_k.
double trilinear(const SymTensor3& t, const Vector& x, const Vector& u, const Vector& v);

double frobenius_distance(const SymTensor3& t, const SymTensor3& s);

/// T - from_components(a, scales).
SymTensor3 deflate(const SymTensor3& t, const ComponentMatrix& a, const Vector& scales);

/// Mode-1 unfolding, d x d^2.
Matrix unfold(const SymTensor3& t);

}  // namespace otd
