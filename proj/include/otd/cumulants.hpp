#pragma once

#include <cstddef>

#include "otd/tensor.hpp"

namespace otd {

/// N samples in R^d, one per row.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(Matrix rows);

  std::size_t count() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  const Matrix& rows() const noexcept { return rows_; }

 private:
  Matrix rows_;
};

Vector sample_mean(const SampleSet& s);

/// Rows translated by the sample mean.
SampleSet center(const SampleSet& s);

/// Third k-statistic by the defining triple sum over sample indices,
///   k3(r,s,t) = (1/N) sum_{i,j,k} phi(i,j,k) x_i[r] x_j[s] x_k[t],
/// with phi = 1 on i = j = k, -1/(N-1) when exactly two indices coincide and
/// 2/((N-1)(N-2)) when all differ. O(N^3 d^3); restricted to 3 <= N <= 40.
SymTensor3 k3_naive(const SampleSet& s);

/// Same statistic in one centered pass:
///   N / ((N-1)(N-2)) * sum_j (x_j - mean)^{(x)3}.
/// Accumulates in fixed-size chunks combined in chunk order.
SymTensor3 k3_fast(const SampleSet& s);

/// (1/N) sum_j x_j x_j^T.
Matrix second_moment(const SampleSet& s);

/// Plug-in estimate of the expected Frobenius error of k3_fast,
///   sqrt((mean_j ||y_j||^6 - ||m3||_F^2) / N), y_j centered, m3 = mean y^{(x)3}.
double k3_standard_error(const SampleSet& s);

}  // namespace otd
