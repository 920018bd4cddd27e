#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "otd/error.hpp"
#include "otd/jennrich.hpp"
#include "otd/tensor.hpp"

namespace otd {

/// How probe pairs (x, y) for the first diagonalization are drawn.
enum class ProbeStrategy {
  /// Every attempt draws x, y iid uniform on the sphere.
  uniform,
  /// Attempts run in rounds of `refine_period`. The first attempt of a round
  /// is uniform; the rest draw uniformly on the orthogonal complement of the
  /// surplus span estimated by the best attempt of all earlier rounds.
  refined,
};

std::string to_string(ProbeStrategy s);
ProbeStrategy probe_strategy_from_string(const std::string& s);

struct DecompositionConfig {
  double epsilon = 1e-6;              // accept when ||T' - T~||_F <= epsilon
  std::size_t rank_n = 1;             // n = r + k
  std::size_t overcompleteness_k = 0; // k
  double norm_bound_M = 1.0;          // accept when max |xi_i|^{1/3} <= 2 M
  std::uint64_t seed = 0;
  std::size_t max_attempts = 10000;
  SpectralTolerances spectral;
  ProbeStrategy probe_strategy = ProbeStrategy::refined;
  std::size_t refine_period = 4;
  /// Attempts of one round evaluated concurrently; results do not depend on it.
  std::size_t threads = 1;

  std::size_t rank_r() const { return rank_n - overcompleteness_k; }
  void validate(std::size_t dim) const;
};

struct Probes {
  Vector x, y;              // first diagonalization
  Vector x_prime, y_prime;  // deflated diagonalization; empty when k = 0
};

struct DecompositionResult {
  ComponentMatrix components;  // xi_i^{1/3} * directions_i (real cube root)
  ComponentMatrix directions;  // unit directions from the diagonalizations
  Vector scales_xi;
  double residual_frobenius = 0.0;
  std::size_t attempts_used = 0;
  Probes probes;
  std::map<ErrorCode, std::size_t> failed_attempts;  // per failure kind
};

/// Best-so-far state reported when no attempt satisfied termination.
struct DecompositionDiagnostics {
  std::size_t attempts = 0;
  std::size_t completed_attempts = 0;
  std::optional<double> best_residual;
  std::optional<double> best_max_cbrt_xi;
  std::optional<DecompositionResult> best;
  std::map<ErrorCode, std::size_t> failed_attempts;
};

class AttemptsExhausted : public Error {
 public:
  explicit AttemptsExhausted(DecompositionDiagnostics diagnostics);
  const DecompositionDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  DecompositionDiagnostics diagnostics_;
};

/// Scale recovery for unit directions A~ given a probe x:
///   xi_i = T(x, b_i, b_i) / <x, a~_i>, with b_i the columns of (A~^+)^T.
/// This is the unique least-squares solution of
///   min || A~ diag(xi_i <x, a~_i>) A~^T - T_x ||_F.
Vector estimate_scales(const SymTensor3& t, const Vector& x, const ComponentMatrix& directions);

/// Randomized decomposition of T~ ~ sum_{i<n} a_i^{(x)3} whose first r = n - k
/// components have full robust Kruskal rank and whose k surplus components are
/// cancelled by probes nearly orthogonal to them.
///
/// Each attempt diagonalizes (T~_x, T~_y) for r directions, recovers their
/// scales, deflates, diagonalizes the residual contractions for the remaining
/// k directions, and accepts when the reconstruction is within epsilon and all
/// |xi_i|^{1/3} <= 2M. Failed sub-steps consume the attempt.
///
/// Throws AttemptsExhausted after max_attempts.
DecompositionResult decompose(const SymTensor3& t, const DecompositionConfig& cfg);

/// Termination predicates, re-checkable from a result.
bool satisfies_termination(const DecompositionResult& r, const DecompositionConfig& cfg);

}  // namespace otd
