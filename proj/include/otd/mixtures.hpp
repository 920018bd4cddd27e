#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>

#include "otd/cumulants.hpp"
#include "otd/decompose.hpp"
#include "otd/tensor.hpp"

namespace otd {

/// Discrete distribution taking value means[i] with probability weights[i].
class DiscreteMixtureParams {
 public:
  DiscreteMixtureParams() = default;
  /// Weights must be nonnegative and sum to 1 within 1e-10.
  DiscreteMixtureParams(Vector weights, ComponentMatrix means);

  std::size_t dim() const noexcept { return means_.dim(); }
  std::size_t count() const noexcept { return means_.count(); }
  const Vector& weights() const noexcept { return weights_; }
  const ComponentMatrix& means() const noexcept { return means_; }

  /// rho_i = ||mu_i||.
  Vector norms() const;
  /// mu_i / ||mu_i|| (zero columns stay zero).
  ComponentMatrix directions() const;
  /// sum_i w_i mu_i.
  Vector mean() const;
  /// sum_i w_i mu_i^{(x)3}.
  SymTensor3 third_moment_tensor() const;
  bool strictly_positive() const;

 private:
  Vector weights_;
  ComponentMatrix means_;
};

struct GmmParams {
  DiscreteMixtureParams mixture;
  Matrix covariance;
};

struct DeconvolutionConfig {
  /// Inner decomposition tolerance. Defaults to 1e-3 / sqrt(d).
  std::optional<double> epsilon;
  /// When set, epsilon = factor * k3_standard_error(samples) instead.
  std::optional<double> noise_floor_factor;
  double rho_max = 2.0;
  double w_min = 0.01;
  double tau = 100.0;
  std::uint64_t seed = 0;
  std::size_t max_attempts = 10000;
  ProbeStrategy probe_strategy = ProbeStrategy::refined;
  std::size_t refine_period = 4;
  std::size_t threads = 1;

  void validate(std::size_t count) const;
};

struct DecoupleResult {
  Vector weights;
  ComponentMatrix means;
  Vector norms;            // (xi_i / w_i)^{1/3}
  Vector null_vector;      // sign-fixed right singular vector for sigma_min
  Vector singular_values;  // of the scaled component matrix
};

/// Splits xi_i = w_i rho_i^3 into weights and norms using the null right
/// singular vector v ~ w^{2/3} of [xi_i^{1/3} a~_i].
///
/// Throws rank_too_low if the scaled components have numerical rank < d - 1,
/// non_positive_singular_vector if v has a non-positive entry after the sign
/// is fixed to make its entries sum positive.
DecoupleResult decouple(const ComponentMatrix& scaled_components, const Vector& xi);

struct DeconvolutionDiagnostics {
  Vector sample_mean;
  ComponentMatrix centered_means;
  double epsilon = 0.0;
  double k3_standard_error = 0.0;
  double k3_norm = 0.0;
  double residual_frobenius = 0.0;
  std::size_t attempts_used = 0;
  std::map<ErrorCode, std::size_t> failed_attempts;
  Vector scales_xi;
  ComponentMatrix directions;
  Vector null_vector;
  Vector singular_values;
  double mean_constraint_norm = 0.0;  // ||sum_i w_i mu_i|| in the centered frame
  std::optional<std::size_t> robust_kruskal_rank;
  bool below_weight_floor = false;
  bool above_norm_bound = false;
};

struct DeconvolutionResult {
  DiscreteMixtureParams params;  // means in the original frame
  DeconvolutionDiagnostics diagnostics;
};

/// Recovers a d-component discrete mixture Z from samples of X = Z + eta
/// where eta has zero mean and zero third cumulant.
DeconvolutionResult blind_deconvolve(const SampleSet& samples, const DeconvolutionConfig& cfg);

struct GmmDiagnostics {
  DeconvolutionDiagnostics deconvolution;
  double covariance_min_eigenvalue = 0.0;
};

struct GmmResult {
  GmmParams params;  // raw covariance estimate
  Matrix covariance_psd;
  GmmDiagnostics diagnostics;
};

/// Gaussian mixture with d components and a shared unknown covariance.
GmmResult estimate_gmm(const SampleSet& samples, const DeconvolutionConfig& cfg);

/// Second moment minus the mixture's second moment, symmetrized.
Matrix covariance_from_moments(const Matrix& second_moment, const Vector& weights, const Matrix& centered_means);

/// Eigenvalues clamped at zero.
Matrix project_psd(const Matrix& symmetric);

}  // namespace otd
