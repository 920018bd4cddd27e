#include "otd/cumulants.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "otd/error.hpp"

namespace otd {

namespace {

constexpr Eigen::Index kChunkRows = 4096;
constexpr std::size_t kNaiveMaxSamples = 40;

void require_k3_size(const SampleSet& s) {
  require(s.count() >= 3, ErrorCode::invalid_argument,
          "third k-statistic needs at least 3 samples, got " + std::to_string(s.count()));
}

}  // namespace

SampleSet::SampleSet(Matrix rows) : rows_(std::move(rows)) {
  require(rows_.cols() >= 1, ErrorCode::invalid_argument, "sample dim must be >= 1");
  require(rows_.allFinite(), ErrorCode::invalid_argument, "samples contain non-finite entries");
}

Vector sample_mean(const SampleSet& s) {
  require(s.count() >= 1, ErrorCode::invalid_argument, "sample_mean of an empty sample set");
  return s.rows().colwise().mean().transpose();
}

SampleSet center(const SampleSet& s) {
  const Vector mean = sample_mean(s);
  return SampleSet(s.rows().rowwise() - mean.transpose());
}

SymTensor3 k3_naive(const SampleSet& s) {
  require_k3_size(s);
  require(s.count() <= kNaiveMaxSamples, ErrorCode::invalid_argument,
          "k3_naive is an O(N^3) reference; N must be <= 40");
  const auto n = static_cast<Eigen::Index>(s.count());
  const auto d = static_cast<Eigen::Index>(s.dim());
  const double nd = static_cast<double>(n);
  const double phi_all_equal = 1.0;
  const double phi_pair = -1.0 / (nd - 1.0);
  const double phi_distinct = 2.0 / ((nd - 1.0) * (nd - 2.0));
  const Matrix& x = s.rows();

  std::vector<double> e(static_cast<std::size_t>(d * d * d), 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        const int distinct = 1 + (j != i) + (k != i && k != j);
        const double phi = distinct == 1 ? phi_all_equal : distinct == 2 ? phi_pair : phi_distinct;
        for (Eigen::Index r = 0; r < d; ++r)
          for (Eigen::Index q = 0; q < d; ++q)
            for (Eigen::Index t = 0; t < d; ++t)
              e[static_cast<std::size_t>((r * d + q) * d + t)] += phi * x(i, r) * x(j, q) * x(k, t);
      }
  for (double& v : e) v /= nd;
  return SymTensor3(static_cast<std::size_t>(d), std::move(e));
}

SymTensor3 k3_fast(const SampleSet& s) {
  require_k3_size(s);
  const SampleSet c = center(s);
  const Matrix& y = c.rows();
  const Eigen::Index n = y.rows();
  const auto d = static_cast<std::size_t>(y.cols());

  struct Orbit {
    Eigen::Index i, j, k;
  };
  std::vector<Orbit> orbits;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      for (std::size_t k = j; k < d; ++k)
        orbits.push_back({static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)});

  std::vector<double> total(orbits.size(), 0.0);
  std::vector<double> chunk(orbits.size());
  for (Eigen::Index start = 0; start < n; start += kChunkRows) {
    const Eigen::Index stop = std::min(n, start + kChunkRows);
    std::fill(chunk.begin(), chunk.end(), 0.0);
    for (Eigen::Index row = start; row < stop; ++row)
      for (std::size_t o = 0; o < orbits.size(); ++o)
        chunk[o] += y(row, orbits[o].i) * y(row, orbits[o].j) * y(row, orbits[o].k);
    for (std::size_t o = 0; o < orbits.size(); ++o) total[o] += chunk[o];
  }

  const double nd = static_cast<double>(n);
  const double factor = nd / ((nd - 1.0) * (nd - 2.0));
  std::vector<double> e(d * d * d, 0.0);
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    const auto [i, j, k] = orbits[o];
    const double v = factor * total[o];
    const auto at = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c) -> double& {
      return e[static_cast<std::size_t>((a * static_cast<Eigen::Index>(d) + b) * static_cast<Eigen::Index>(d) + c)];
    };
    at(i, j, k) = at(i, k, j) = at(j, i, k) = at(j, k, i) = at(k, i, j) = at(k, j, i) = v;
  }
  return SymTensor3(d, std::move(e));
}

Matrix second_moment(const SampleSet& s) {
  require(s.count() >= 1, ErrorCode::invalid_argument, "second_moment of an empty sample set");
  Matrix m = s.rows().transpose() * s.rows() / static_cast<double>(s.count());
  return 0.5 * (m + m.transpose());
}

double k3_standard_error(const SampleSet& s) {
  require_k3_size(s);
  const SampleSet c = center(s);
  const double nd = static_cast<double>(s.count());
  const double sixth = c.rows().rowwise().squaredNorm().array().cube().mean();
  const double m3_norm = k3_fast(s).frobenius_norm() * (nd - 1.0) * (nd - 2.0) / (nd * nd);
  return std::sqrt(std::max(0.0, sixth - m3_norm * m3_norm) / nd);
}

}  // namespace otd
