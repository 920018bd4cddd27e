#include "otd/mixtures.hpp"

#include <cmath>
#include <string>

#include "otd/error.hpp"
#include "otd/numerics.hpp"
#include "otd/synth.hpp"

namespace otd {

namespace {

constexpr double kSimplexTol = 1e-10;
constexpr std::size_t kKruskalMaxColumns = 16;

Error with_context(const Error& e, const std::string& where) {
  return Error(e.code(), where + ": " + e.what());
}

}  // namespace

DiscreteMixtureParams::DiscreteMixtureParams(Vector weights, ComponentMatrix means)
    : weights_(std::move(weights)), means_(std::move(means)) {
  require(static_cast<std::size_t>(weights_.size()) == means_.count(), ErrorCode::dimension_mismatch,
          "mixture: weight count does not match mean count");
  require(weights_.allFinite() && (weights_.array() >= 0.0).all(), ErrorCode::invalid_argument,
          "mixture: weights must be nonnegative");
  require(std::abs(weights_.sum() - 1.0) <= kSimplexTol, ErrorCode::invalid_argument,
          "mixture: weights must sum to 1");
}

Vector DiscreteMixtureParams::norms() const { return means_.matrix().colwise().norm().transpose(); }

ComponentMatrix DiscreteMixtureParams::directions() const {
  Matrix m = means_.matrix();
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    const double n = m.col(i).norm();
    if (n > 0.0) m.col(i) /= n;
  }
  return ComponentMatrix(std::move(m));
}

Vector DiscreteMixtureParams::mean() const { return means_.matrix() * weights_; }

SymTensor3 DiscreteMixtureParams::third_moment_tensor() const { return from_components(means_, weights_); }

bool DiscreteMixtureParams::strictly_positive() const { return (weights_.array() > 0.0).all(); }

void DeconvolutionConfig::validate(std::size_t count) const {
  if (epsilon) require(*epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");
  if (noise_floor_factor)
    require(*noise_floor_factor > 0.0, ErrorCode::invalid_argument, "noise floor factor must be positive");
  require(rho_max > 0.0, ErrorCode::invalid_argument, "rho_max must be positive");
  require(tau > 0.0, ErrorCode::invalid_argument, "tau must be positive");
  require(w_min > 0.0 && w_min * static_cast<double>(count) <= 1.0 + 1e-12, ErrorCode::invalid_argument,
          "w_min must lie in (0, 1/d]");
  require(max_attempts >= 1, ErrorCode::invalid_argument, "max_attempts must be >= 1");
}

DecoupleResult decouple(const ComponentMatrix& scaled_components, const Vector& xi) {
  const std::size_t d = scaled_components.dim();
  require(scaled_components.count() == d, ErrorCode::dimension_mismatch,
          "decouple: expects d components in R^d");
  require(static_cast<std::size_t>(xi.size()) == d, ErrorCode::dimension_mismatch, "decouple: xi length");
  require(d >= 2, ErrorCode::invalid_argument, "decouple: needs d >= 2");

  const Matrix& a = scaled_components.matrix();
  const SvdResult s = svd(a);
  const auto dm1 = static_cast<Eigen::Index>(d) - 2;  // index of sigma_{d-1}
  require(s.singular_values(0) > 0.0 && s.singular_values(dm1) > default_rank_tol(a) * s.singular_values(0),
          ErrorCode::rank_too_low, "scaled components have numerical rank below d - 1");

  Vector v = s.right.col(static_cast<Eigen::Index>(d) - 1);
  if (v.sum() < 0.0) v = -v;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    require(v(i) > 0.0, ErrorCode::non_positive_singular_vector,
            "null singular vector has a non-positive entry; decomposition too inaccurate to decouple");

  const Vector p = v.array().pow(1.5).matrix();
  const Vector w = p / p.sum();
  Matrix means = a;
  Vector norms(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < means.cols(); ++i) {
    means.col(i) /= std::cbrt(w(i));
    norms(i) = std::cbrt(xi(i) / w(i));
  }
  return {w, ComponentMatrix(std::move(means)), norms, v, s.singular_values};
}

Matrix covariance_from_moments(const Matrix& second_moment, const Vector& weights, const Matrix& centered_means) {
  Matrix cov = second_moment - centered_means * weights.asDiagonal() * centered_means.transpose();
  return 0.5 * (cov + cov.transpose());
}

Matrix project_psd(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric);
  require(eig.info() == Eigen::Success, ErrorCode::non_convergence, "symmetric eigendecomposition failed");
  const Vector clamped = eig.eigenvalues().cwiseMax(0.0);
  Matrix out = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

DeconvolutionResult blind_deconvolve(const SampleSet& samples, const DeconvolutionConfig& cfg) {
  const std::size_t d = samples.dim();
  require(d >= 3, ErrorCode::invalid_argument, "blind_deconvolve: needs d >= 3");
  require(samples.count() >= 3, ErrorCode::invalid_argument, "blind_deconvolve: needs at least 3 samples");
  cfg.validate(d);

  DeconvolutionDiagnostics diag;
  diag.sample_mean = sample_mean(samples);
  const SampleSet centered = center(samples);
  const SymTensor3 k3 = k3_fast(centered);
  diag.k3_norm = k3.frobenius_norm();
  diag.k3_standard_error = k3_standard_error(centered);
  require(diag.k3_norm > 0.0, ErrorCode::rank_too_low, "blind_deconvolve: sample third cumulant is zero");

  diag.epsilon = cfg.noise_floor_factor ? *cfg.noise_floor_factor * diag.k3_standard_error
                                        : cfg.epsilon.value_or(1e-3 / std::sqrt(static_cast<double>(d)));

  DecompositionConfig dc;
  dc.epsilon = diag.epsilon;
  dc.rank_n = d;
  dc.overcompleteness_k = 1;
  dc.norm_bound_M = cfg.rho_max;
  dc.seed = cfg.seed;
  dc.max_attempts = cfg.max_attempts;
  dc.probe_strategy = cfg.probe_strategy;
  dc.refine_period = cfg.refine_period;
  dc.threads = cfg.threads;

  DecompositionResult dec;
  try {
    dec = decompose(k3, dc);
  } catch (const AttemptsExhausted&) {
    throw;
  } catch (const Error& e) {
    throw with_context(e, "blind_deconvolve: decomposition");
  }
  diag.residual_frobenius = dec.residual_frobenius;
  diag.attempts_used = dec.attempts_used;
  diag.failed_attempts = dec.failed_attempts;
  diag.scales_xi = dec.scales_xi;
  diag.directions = dec.directions;

  DecoupleResult split;
  try {
    split = decouple(dec.components, dec.scales_xi);
  } catch (const Error& e) {
    throw with_context(e, "blind_deconvolve: decoupling");
  }
  diag.null_vector = split.null_vector;
  diag.singular_values = split.singular_values;
  diag.centered_means = split.means;
  diag.mean_constraint_norm = (split.means.matrix() * split.weights).norm();
  diag.below_weight_floor = split.weights.minCoeff() < cfg.w_min;
  diag.above_norm_bound = split.norms.cwiseAbs().maxCoeff() > cfg.rho_max;
  if (d <= kKruskalMaxColumns) diag.robust_kruskal_rank = robust_kruskal_rank(split.means, cfg.tau);

  Matrix means = split.means.matrix();
  means.colwise() += diag.sample_mean;
  return {DiscreteMixtureParams(split.weights / split.weights.sum(), ComponentMatrix(std::move(means))),
          std::move(diag)};
}

GmmResult estimate_gmm(const SampleSet& samples, const DeconvolutionConfig& cfg) {
  DeconvolutionResult deconv = blind_deconvolve(samples, cfg);
  const SampleSet centered = center(samples);
  Matrix cov = covariance_from_moments(second_moment(centered), deconv.params.weights(),
                                       deconv.diagnostics.centered_means.matrix());

  GmmResult out;
  out.covariance_psd = project_psd(cov);
  out.diagnostics.covariance_min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(cov).eigenvalues()(0);
  out.params = GmmParams{std::move(deconv.params), std::move(cov)};
  out.diagnostics.deconvolution = std::move(deconv.diagnostics);
  return out;
}

}  // namespace otd
