#pragma once

// Brute-force oracles and small generators shared by the test binaries.
// Nothing here calls into the library's algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline Matrix unit_columns(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Matrix m = gaussian_matrix(rows, cols, rng);
  for (Eigen::Index j = 0; j < cols; ++j) m.col(j).normalize();
  return m;
}

// sum_i s_i a_i[p] a_i[q] a_i[r], entries (p,q,r) row-major.
inline std::vector<double> rank_one_sum(const Matrix& a, const Vector& s) {
  const auto d = a.rows();
  std::vector<double> out(static_cast<std::size_t>(d * d * d), 0.0);
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = 0; q < d; ++q)
      for (Eigen::Index r = 0; r < d; ++r) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < a.cols(); ++i) acc += s(i) * a(p, i) * a(q, i) * a(r, i);
        out[static_cast<std::size_t>((p * d + q) * d + r)] = acc;
      }
  return out;
}

inline double frobenius(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(acc);
}

// Minimum over all n! permutations of sum_i ||truth_{pi(i)} - est_i||, and the max error at that minimum.
struct BruteMatch {
  double total = std::numeric_limits<double>::infinity();
  double max = 0.0;
  std::vector<std::size_t> perm;
};

inline BruteMatch brute_force_match(const Matrix& truth, const Matrix& est) {
  const auto n = static_cast<std::size_t>(truth.cols());
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  BruteMatch best;
  do {
    double total = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = (truth.col(static_cast<Eigen::Index>(p[i])) - est.col(static_cast<Eigen::Index>(i))).norm();
      total += e;
      mx = std::max(mx, e);
    }
    if (total < best.total) best = {total, mx, p};
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// Direction error up to sign and permutation: columns compared as +-a.
inline double sign_perm_error(const Matrix& truth, const Matrix& est) {
  const auto n = static_cast<std::size_t>(truth.cols());
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = truth.col(static_cast<Eigen::Index>(p[i]));
      const auto e = est.col(static_cast<Eigen::Index>(i));
      mx = std::max(mx, std::min((t - e).norm(), (t + e).norm()));
    }
    best = std::min(best, mx);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// Plain Kruskal rank by exact-rank subset enumeration (full-pivot LU rank).
inline std::size_t kruskal_rank(const Matrix& a, double rank_threshold = 1e-9) {
  const auto n = static_cast<std::size_t>(a.cols());
  std::size_t k = 0;
  for (std::size_t size = 1; size <= std::min<std::size_t>(n, static_cast<std::size_t>(a.rows())); ++size) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
    bool all = true;
    do {
      Matrix sub(a.rows(), static_cast<Eigen::Index>(size));
      Eigen::Index c = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) sub.col(c++) = a.col(static_cast<Eigen::Index>(i));
      Eigen::FullPivLU<Matrix> lu(sub);
      lu.setThreshold(rank_threshold);
      if (static_cast<std::size_t>(lu.rank()) < size) {
        all = false;
        break;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
    if (!all) break;
    k = size;
  }
  return k;
}

// Sorted singular values from the eigenvalues of the Gram matrix.
inline Vector gram_singular_values(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  Vector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

// Unit-column A (d x r) with sigma_r(A) >= min_sigma.
inline Matrix conditioned_columns(int d, int r, double min_sigma, std::mt19937_64& rng) {
  for (;;) {
    Matrix a = unit_columns(d, r, rng);
    if (gram_singular_values(a)(r - 1) >= min_sigma) return a;
  }
}

// mu, lambda with ratios mu_i / lambda_i spread over [-1, 1.5] and pairwise separated by >= gap.
inline void separated_pencil(int r, double gap, std::mt19937_64& rng, Vector& mu, Vector& lambda) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  mu.resize(r);
  lambda.resize(r);
  for (int i = 0; i < r; ++i) {
    lambda(i) = u(rng) * (i % 2 ? -1.0 : 1.0);
    const double ratio = -1.0 + (2.5 * i) / r + gap * 0.5 * u(rng);
    mu(i) = ratio * lambda(i);
  }
}

inline double min_ratio_gap(const Vector& mu, const Vector& lambda) {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = i + 1; j < mu.size(); ++j)
      gap = std::min(gap, std::abs(mu(i) / lambda(i) - mu(j) / lambda(j)));
  return gap;
}

}  // namespace oracle
