#pragma once

#include <cstdint>
#include <random>

#include "otd/tensor.hpp"

namespace otd {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent streams from (seed, index).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Vector gaussian_vector(std::size_t d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return v;
}

/// Uniform on the unit sphere S^{d-1}: a normalized standard Gaussian vector.
inline Vector random_unit_vector(std::size_t d, Rng& rng) {
  for (;;) {
    Vector v = gaussian_vector(d, rng);
    const double n = v.norm();
    if (n > 0.0) return v / n;
  }
}

}  // namespace otd
