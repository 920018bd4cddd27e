#include "otd/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <vector>

#include "otd/numerics.hpp"
#include "otd/random.hpp"

namespace otd {

namespace {

constexpr double kProbeOverlapFloor = 1e-12;

struct AttemptOutcome {
  std::optional<DecompositionResult> result;
  ErrorCode failure = ErrorCode::invalid_argument;
  Matrix surplus_span;  // orthonormal basis estimate of span(a_{r+1..n})
};

double max_cbrt_abs(const Vector& xi) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) m = std::max(m, std::cbrt(std::abs(xi(i))));
  return m;
}

Vector probe_in_complement(std::size_t d, const Matrix* avoid, Rng& rng) {
  if (avoid == nullptr) return random_unit_vector(d, rng);
  for (;;) {
    Vector g = gaussian_vector(d, rng);
    g -= *avoid * (avoid->transpose() * g);
    const double n = g.norm();
    if (n > 1e-8) return g / n;
  }
}

AttemptOutcome run_attempt(const SymTensor3& t, const DecompositionConfig& cfg, std::size_t index,
                           const Matrix* avoid) {
  const std::size_t d = t.dim();
  const std::size_t r = cfg.rank_r();
  const std::size_t k = cfg.overcompleteness_k;

  Rng rng(derive_seed(cfg.seed, index));
  Probes probes;
  probes.x = probe_in_complement(d, avoid, rng);
  probes.y = probe_in_complement(d, avoid, rng);
  if (k > 0) {
    probes.x_prime = random_unit_vector(d, rng);
    probes.y_prime = random_unit_vector(d, rng);
  }

  AttemptOutcome out;
  try {
    const ComponentMatrix first =
        diagonalize(contract(t, probes.x), contract(t, probes.y), JennrichConfig{r, cfg.spectral});
    const Vector xi_first = estimate_scales(t, probes.x, first);

    ComponentMatrix directions = first;
    Vector xi = xi_first;
    if (k > 0) {
      const SymTensor3 residual = deflate(t, first, xi_first);
      const ComponentMatrix second = diagonalize(contract(residual, probes.x_prime),
                                                 contract(residual, probes.y_prime), JennrichConfig{k, cfg.spectral});
      const Vector xi_second = estimate_scales(residual, probes.x_prime, second);

      directions = first.append(second);
      xi.resize(static_cast<Eigen::Index>(r + k));
      xi << xi_first, xi_second;
      out.surplus_span = svd(unfold(residual)).left.leftCols(static_cast<Eigen::Index>(k));
    }

    const SymTensor3 reconstruction = from_components(directions, xi);
    Matrix scaled = directions.matrix();
    for (Eigen::Index i = 0; i < xi.size(); ++i) scaled.col(i) *= std::cbrt(xi(i));

    DecompositionResult res{ComponentMatrix(std::move(scaled)),
                            std::move(directions),
                            std::move(xi),
                            frobenius_distance(reconstruction, t),
                            index + 1,
                            std::move(probes),
                            {}};
    if (!std::isfinite(res.residual_frobenius)) throw Error(ErrorCode::non_convergence, "non-finite residual");
    out.result = std::move(res);
  } catch (const Error& e) {
    out.failure = e.code();
  }
  return out;
}

}  // namespace

std::string to_string(ProbeStrategy s) { return s == ProbeStrategy::uniform ? "uniform" : "refined"; }

ProbeStrategy probe_strategy_from_string(const std::string& s) {
  if (s == "uniform") return ProbeStrategy::uniform;
  if (s == "refined") return ProbeStrategy::refined;
  throw Error(ErrorCode::invalid_argument, "unknown probe strategy '" + s + "'");
}

void DecompositionConfig::validate(std::size_t dim) const {
  require(epsilon >= 0.0 && std::isfinite(epsilon), ErrorCode::invalid_argument, "epsilon must be >= 0");
  require(norm_bound_M > 0.0 && std::isfinite(norm_bound_M), ErrorCode::invalid_argument,
          "norm bound M must be positive");
  require(rank_n >= 1, ErrorCode::invalid_argument, "rank n must be >= 1");
  require(overcompleteness_k + 1 <= rank_n, ErrorCode::invalid_argument, "overcompleteness k must satisfy k <= n - 1");
  require(rank_r() <= dim, ErrorCode::invalid_argument,
          "r = n - k = " + std::to_string(rank_r()) + " exceeds tensor dim " + std::to_string(dim));
  require(overcompleteness_k <= dim, ErrorCode::invalid_argument, "k exceeds tensor dim");
  require(max_attempts >= 1, ErrorCode::invalid_argument, "max_attempts must be >= 1");
  require(refine_period >= 1, ErrorCode::invalid_argument, "refine_period must be >= 1");
  require(threads >= 1, ErrorCode::invalid_argument, "threads must be >= 1");
}

AttemptsExhausted::AttemptsExhausted(DecompositionDiagnostics diagnostics)
    : Error(ErrorCode::attempts_exhausted,
            std::to_string(diagnostics.attempts) + " attempts without meeting termination" +
                (diagnostics.best_residual ? " (best residual " + std::to_string(*diagnostics.best_residual) + ")"
                                           : std::string(" (no attempt completed)"))),
      diagnostics_(std::move(diagnostics)) {}

Vector estimate_scales(const SymTensor3& t, const Vector& x, const ComponentMatrix& directions) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  require(directions.dim() == t.dim() && x.size() == d, ErrorCode::dimension_mismatch,
          "estimate_scales: dimension mismatch");
  const Matrix& a = directions.matrix();
  const Eigen::Index n = a.cols();
  if (n == 0) return Vector(0);

  const Vector sigma = svd(a).singular_values;
  require(sigma(n - 1) > default_rank_tol(a) * sigma(0), ErrorCode::rank_deficient_components,
          "directions are numerically rank deficient");

  const Vector overlap = a.transpose() * x;
  for (Eigen::Index i = 0; i < n; ++i)
    require(std::abs(overlap(i)) >= kProbeOverlapFloor, ErrorCode::probe_degenerate,
            "probe is orthogonal to a recovered direction");

  const Matrix b = pseudoinverse(a).transpose();
  const Matrix tx = contract(t, x);
  Vector xi(n);
  for (Eigen::Index i = 0; i < n; ++i) xi(i) = b.col(i).dot(tx * b.col(i)) / overlap(i);
  return xi;
}

bool satisfies_termination(const DecompositionResult& r, const DecompositionConfig& cfg) {
  return r.residual_frobenius <= cfg.epsilon && max_cbrt_abs(r.scales_xi) <= 2.0 * cfg.norm_bound_M;
}

DecompositionResult decompose(const SymTensor3& t, const DecompositionConfig& cfg) {
  cfg.validate(t.dim());

  const bool refine = cfg.probe_strategy == ProbeStrategy::refined && cfg.overcompleteness_k > 0;
  const std::size_t round_size = refine ? cfg.refine_period : cfg.threads;

  DecompositionDiagnostics diag;
  std::optional<Matrix> avoid;

  for (std::size_t first = 0; first < cfg.max_attempts; first += round_size) {
    const std::size_t m = std::min(round_size, cfg.max_attempts - first);
    std::vector<AttemptOutcome> outcomes(m);

    auto evaluate = [&](std::size_t j) {
      const bool use_avoid = refine && j > 0 && avoid.has_value();
      outcomes[j] = run_attempt(t, cfg, first + j, use_avoid ? &*avoid : nullptr);
    };
    if (cfg.threads > 1 && m > 1) {
      std::vector<std::future<void>> jobs;
      for (std::size_t j = 0; j < m; ++j) {
        jobs.push_back(std::async(std::launch::async, evaluate, j));
        if (jobs.size() == cfg.threads) {
          for (auto& f : jobs) f.get();
          jobs.clear();
        }
      }
      for (auto& f : jobs) f.get();
    } else {
      for (std::size_t j = 0; j < m; ++j) evaluate(j);
    }

    for (std::size_t j = 0; j < m; ++j) {
      AttemptOutcome& o = outcomes[j];
      diag.attempts = first + j + 1;
      if (!o.result) {
        ++diag.failed_attempts[o.failure];
        continue;
      }
      ++diag.completed_attempts;
      if (satisfies_termination(*o.result, cfg)) {
        o.result->failed_attempts = diag.failed_attempts;
        return std::move(*o.result);
      }
      if (!diag.best_residual || o.result->residual_frobenius < *diag.best_residual) {
        diag.best_residual = o.result->residual_frobenius;
        diag.best_max_cbrt_xi = max_cbrt_abs(o.result->scales_xi);
        diag.best = *o.result;
        if (refine) avoid = o.surplus_span;
      }
    }
  }
  throw AttemptsExhausted(std::move(diag));
}

}  // namespace otd
