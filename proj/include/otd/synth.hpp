#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "otd/cumulants.hpp"
#include "otd/mixtures.hpp"
#include "otd/tensor.hpp"

namespace otd {

/// Zero-mean noise with vanishing odd moments and finite sixth moment.
struct NoiseSpec {
  enum class Kind { none, gaussian, uniform_box, laplace };

  Kind kind = Kind::none;
  Matrix covariance;  // gaussian
  Vector scale;       // uniform_box half-widths or laplace scales, per coordinate

  static NoiseSpec none() { return {}; }
  static NoiseSpec gaussian(Matrix covariance);
  static NoiseSpec uniform_box(Vector half_width);
  static NoiseSpec laplace(Vector scale);

  /// Parses "none", "gaussian:s", "uniform:h", "laplace:b", where the value is
  /// a comma-separated per-coordinate list or one scalar broadcast to `dim`.
  /// For gaussian the values are standard deviations of a diagonal covariance.
  static NoiseSpec parse(const std::string& text, std::size_t dim);

  /// Closed-form covariance of one noise draw.
  Matrix noise_covariance(std::size_t dim) const;
  std::string describe() const;
};

std::string to_string(NoiseSpec::Kind kind);

enum class ComponentStructure {
  random_unit,          // iid normalized Gaussian columns
  negative_sum,         // d random unit columns plus -(sum)/||sum||
  deconvolution_style,  // means of a zero-mean mixture, see gen_deconvolution_mixture
};

ComponentStructure component_structure_from_string(const std::string& s);

struct MixtureGenOptions {
  double rho_min = 0.5;
  double rho_max = 1.5;
  double w_min = 0.05;
  double tau = 20.0;
  std::size_t max_retries = 100;
};

/// Zero-mean d-component mixture: d - 1 random means with norms in
/// [rho_min, rho_max], weights w_min + (1 - d w_min) * Dirichlet(1), and
/// mu_d = -(sum_{i<d} w_i mu_i) / w_d. Redraws until ||mu_d|| is in range and
/// the robust Kruskal rank at tau is at least d - 1.
DiscreteMixtureParams gen_deconvolution_mixture(std::size_t d, std::uint64_t seed, const MixtureGenOptions& opts = {});

ComponentMatrix gen_components(std::size_t d, std::size_t n, ComponentStructure structure, std::uint64_t seed,
                               const MixtureGenOptions& opts = {});

/// Largest k such that every k-column subset S has sigma_k(A_S) >= 1/tau.
/// Exhaustive; n <= 16.
std::size_t robust_kruskal_rank(const ComponentMatrix& a, double tau);

/// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres).
/// Returns assignment[row] = column.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

struct MatchReport {
  std::vector<std::size_t> permutation;  // estimate column i matches truth column permutation[i]
  Vector per_component_error;            // ||truth_{pi(i)} - estimate_i||
  double max_error = 0.0;
  double mean_error = 0.0;
  double total_error = 0.0;
};

MatchReport match_components(const ComponentMatrix& truth, const ComponentMatrix& estimate);

/// Weight error under a known matching: max_i |w_{pi(i)} - w~_i|.
double matched_weight_error(const Vector& truth, const Vector& estimate, const std::vector<std::size_t>& permutation);

/// N iid draws of Z + eta; deterministic in `seed`.
SampleSet sample_mixture(const DiscreteMixtureParams& params, const NoiseSpec& noise, std::size_t n,
                         std::uint64_t seed);

/// T plus a symmetrized Gaussian tensor rescaled to Frobenius norm eps_in.
SymTensor3 perturb_tensor(const SymTensor3& t, double eps_in, std::uint64_t seed);

/// Haar-random rotation (det = +1).
Matrix random_rotation(std::size_t d, std::uint64_t seed);

}  // namespace otd
