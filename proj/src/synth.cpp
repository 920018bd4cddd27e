#include "otd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "otd/error.hpp"
#include "otd/numerics.hpp"
#include "otd/random.hpp"

namespace otd {

namespace {

constexpr std::size_t kMaxKruskalColumns = 16;

Vector parse_values(const std::string& text, std::size_t dim) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      require(used == item.size(), ErrorCode::invalid_argument, "bad number '" + item + "'");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_argument, "bad number '" + item + "' in noise spec");
    }
  }
  if (vals.size() == 1) return Vector::Constant(static_cast<Eigen::Index>(dim), vals[0]);
  require(vals.size() == dim, ErrorCode::dimension_mismatch, "noise spec needs 1 or d values");
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Matrix unit_gaussian_columns(std::size_t d, std::size_t n, Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < m.cols(); ++c) m.col(c) = random_unit_vector(d, rng);
  return m;
}

}  // namespace

NoiseSpec NoiseSpec::gaussian(Matrix covariance) {
  require(covariance.rows() == covariance.cols(), ErrorCode::dimension_mismatch, "noise covariance must be square");
  require((covariance - covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-12, ErrorCode::invalid_argument,
          "noise covariance must be symmetric");
  require(Eigen::SelfAdjointEigenSolver<Matrix>(covariance).eigenvalues().minCoeff() >= -1e-12,
          ErrorCode::invalid_argument, "noise covariance must be PSD");
  NoiseSpec s;
  s.kind = Kind::gaussian;
  s.covariance = std::move(covariance);
  return s;
}

NoiseSpec NoiseSpec::uniform_box(Vector half_width) {
  require((half_width.array() > 0.0).all(), ErrorCode::invalid_argument, "uniform half-widths must be positive");
  NoiseSpec s;
  s.kind = Kind::uniform_box;
  s.scale = std::move(half_width);
  return s;
}

NoiseSpec NoiseSpec::laplace(Vector scale) {
  require((scale.array() > 0.0).all(), ErrorCode::invalid_argument, "laplace scales must be positive");
  NoiseSpec s;
  s.kind = Kind::laplace;
  s.scale = std::move(scale);
  return s;
}

NoiseSpec NoiseSpec::parse(const std::string& text, std::size_t dim) {
  if (text == "none") return none();
  const auto colon = text.find(':');
  require(colon != std::string::npos, ErrorCode::invalid_argument,
          "noise spec must be none or kind:value[,value...], got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const Vector values = parse_values(text.substr(colon + 1), dim);
  if (kind == "gaussian") {
    require((values.array() >= 0.0).all(), ErrorCode::invalid_argument, "gaussian std must be >= 0");
    return gaussian(values.array().square().matrix().asDiagonal());
  }
  if (kind == "uniform") return uniform_box(values);
  if (kind == "laplace") return laplace(values);
  throw Error(ErrorCode::invalid_argument, "unknown noise kind '" + kind + "'");
}

Matrix NoiseSpec::noise_covariance(std::size_t dim) const {
  const auto d = static_cast<Eigen::Index>(dim);
  switch (kind) {
    case Kind::none: return Matrix::Zero(d, d);
    case Kind::gaussian: return covariance;
    case Kind::uniform_box: return (scale.array().square() / 3.0).matrix().asDiagonal();
    case Kind::laplace: return (2.0 * scale.array().square()).matrix().asDiagonal();
  }
  return Matrix::Zero(d, d);
}

std::string to_string(NoiseSpec::Kind kind) {
  switch (kind) {
    case NoiseSpec::Kind::none: return "none";
    case NoiseSpec::Kind::gaussian: return "gaussian";
    case NoiseSpec::Kind::uniform_box: return "uniform";
    case NoiseSpec::Kind::laplace: return "laplace";
  }
  return "none";
}

std::string NoiseSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == Kind::uniform_box || kind == Kind::laplace) {
    os << ':';
    for (Eigen::Index i = 0; i < scale.size(); ++i) os << (i ? "," : "") << scale(i);
  } else if (kind == Kind::gaussian) {
    os << ":cov";
  }
  return os.str();
}

ComponentStructure component_structure_from_string(const std::string& s) {
  if (s == "random_unit") return ComponentStructure::random_unit;
  if (s == "negative_sum") return ComponentStructure::negative_sum;
  if (s == "deconvolution" || s == "deconvolution_style") return ComponentStructure::deconvolution_style;
  throw Error(ErrorCode::invalid_argument, "unknown component structure '" + s + "'");
}

DiscreteMixtureParams gen_deconvolution_mixture(std::size_t d, std::uint64_t seed, const MixtureGenOptions& opts) {
  require(d >= 2, ErrorCode::invalid_argument, "deconvolution mixture needs d >= 2");
  require(opts.w_min > 0.0 && opts.w_min * static_cast<double>(d) <= 1.0, ErrorCode::invalid_argument,
          "w_min must lie in (0, 1/d]");
  require(0.0 < opts.rho_min && opts.rho_min <= opts.rho_max, ErrorCode::invalid_argument,
          "need 0 < rho_min <= rho_max");

  const auto n = static_cast<Eigen::Index>(d);
  for (std::size_t attempt = 0; attempt < opts.max_retries; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> radius(opts.rho_min, opts.rho_max);

    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = expo(rng);
    w = (opts.w_min + (1.0 - static_cast<double>(d) * opts.w_min) * (w / w.sum()).array()).matrix();
    w /= w.sum();

    Matrix means(n, n);
    means.leftCols(n - 1) = unit_gaussian_columns(d, d - 1, rng);
    for (Eigen::Index i = 0; i + 1 < n; ++i) means.col(i) *= radius(rng);
    means.col(n - 1) = -(means.leftCols(n - 1) * w.head(n - 1)) / w(n - 1);

    const double last = means.col(n - 1).norm();
    if (last < opts.rho_min || last > opts.rho_max) continue;
    ComponentMatrix mu(means);
    if (robust_kruskal_rank(mu, opts.tau) + 1 < d) continue;
    return DiscreteMixtureParams(std::move(w), std::move(mu));
  }
  throw Error(ErrorCode::invalid_argument, "could not generate a mixture meeting the constraints in " +
                                               std::to_string(opts.max_retries) + " draws");
}

ComponentMatrix gen_components(std::size_t d, std::size_t n, ComponentStructure structure, std::uint64_t seed,
                               const MixtureGenOptions& opts) {
  require(d >= 1 && n >= 1, ErrorCode::invalid_argument, "need d >= 1 and n >= 1");
  switch (structure) {
    case ComponentStructure::random_unit: {
      const std::size_t cap = d + (d >= 2 ? (d - 2) / 2 : 0);
      require(n <= cap, ErrorCode::invalid_argument,
              "random_unit supports n <= d + floor((d-2)/2) = " + std::to_string(cap));
      Rng rng(derive_seed(seed, 0));
      return ComponentMatrix(unit_gaussian_columns(d, n, rng));
    }
    case ComponentStructure::negative_sum: {
      require(n >= 2 && n <= d + 1, ErrorCode::invalid_argument, "negative_sum needs 2 <= n <= d + 1");
      for (std::size_t attempt = 0; attempt < opts.max_retries; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
        m.leftCols(static_cast<Eigen::Index>(n - 1)) = unit_gaussian_columns(d, n - 1, rng);
        const Vector sum = m.leftCols(static_cast<Eigen::Index>(n - 1)).rowwise().sum();
        if (sum.norm() < 1e-3) continue;
        m.col(static_cast<Eigen::Index>(n - 1)) = -sum / sum.norm();
        ComponentMatrix out(std::move(m));
        if (robust_kruskal_rank(out, opts.tau) < std::min(n - 1, d)) continue;
        return out;
      }
      throw Error(ErrorCode::invalid_argument, "could not generate well-conditioned negative_sum components");
    }
    case ComponentStructure::deconvolution_style:
      require(n == d, ErrorCode::invalid_argument, "deconvolution_style needs n = d");
      return gen_deconvolution_mixture(d, seed, opts).means();
  }
  throw Error(ErrorCode::invalid_argument, "unknown structure");
}

std::size_t robust_kruskal_rank(const ComponentMatrix& a, double tau) {
  require(tau > 0.0, ErrorCode::invalid_argument, "tau must be positive");
  const std::size_t n = a.count();
  require(n <= kMaxKruskalColumns, ErrorCode::invalid_argument, "robust_kruskal_rank: at most 16 columns");
  const std::size_t kmax = std::min(n, a.dim());
  const double floor = 1.0 / tau;

  // sigma_k of a k-subset is at most sigma_{k-1} of any of its (k-1)-subsets,
  // so the passing sizes form a prefix 1..K.
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      Matrix sub(static_cast<Eigen::Index>(a.dim()), static_cast<Eigen::Index>(k));
      Eigen::Index c = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) sub.col(c++) = a.matrix().col(static_cast<Eigen::Index>(i));
      const Vector sigma = Eigen::JacobiSVD<Matrix>(sub).singularValues();
      if (sigma(static_cast<Eigen::Index>(k) - 1) < floor) return k - 1;
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return kmax;
}

std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  require(cost.rows() == cost.cols(), ErrorCode::dimension_mismatch, "assignment needs a square cost matrix");
  const auto n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a sentinel.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

MatchReport match_components(const ComponentMatrix& truth, const ComponentMatrix& estimate) {
  require(truth.dim() == estimate.dim() && truth.count() == estimate.count(), ErrorCode::dimension_mismatch,
          "match_components: shapes differ");
  const auto n = static_cast<Eigen::Index>(truth.count());
  Matrix cost(n, n);  // rows: estimate, cols: truth
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = (estimate.matrix().col(i) - truth.matrix().col(j)).norm();

  MatchReport report;
  report.permutation = solve_assignment(cost);
  report.per_component_error.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    report.per_component_error(i) = cost(i, static_cast<Eigen::Index>(report.permutation[static_cast<std::size_t>(i)]));
  if (n > 0) {
    report.max_error = report.per_component_error.maxCoeff();
    report.total_error = report.per_component_error.sum();
    report.mean_error = report.total_error / static_cast<double>(n);
  }
  return report;
}

double matched_weight_error(const Vector& truth, const Vector& estimate, const std::vector<std::size_t>& permutation) {
  require(truth.size() == estimate.size() && static_cast<std::size_t>(truth.size()) == permutation.size(),
          ErrorCode::dimension_mismatch, "matched_weight_error: sizes differ");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < estimate.size(); ++i)
    worst = std::max(worst, std::abs(truth(static_cast<Eigen::Index>(permutation[static_cast<std::size_t>(i)])) - estimate(i)));
  return worst;
}

SampleSet sample_mixture(const DiscreteMixtureParams& params, const NoiseSpec& noise, std::size_t n,
                         std::uint64_t seed) {
  require(n >= 1, ErrorCode::invalid_argument, "sample_mixture: N must be >= 1");
  const std::size_t d = params.dim();
  const auto dd = static_cast<Eigen::Index>(d);
  Matrix root;
  if (noise.kind == NoiseSpec::Kind::gaussian) {
    require(noise.covariance.rows() == dd, ErrorCode::dimension_mismatch, "noise covariance dim");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(noise.covariance);
    root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  } else if (noise.kind != NoiseSpec::Kind::none) {
    require(noise.scale.size() == dd, ErrorCode::dimension_mismatch, "noise scale dim");
  }

  Rng rng(derive_seed(seed, 0));
  const Vector& w = params.weights();
  std::discrete_distribution<std::size_t> pick(w.data(), w.data() + w.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  Matrix rows(static_cast<Eigen::Index>(n), dd);
  Vector z(dd);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const auto c = static_cast<Eigen::Index>(pick(rng));
    Vector x = params.means().matrix().col(c);
    switch (noise.kind) {
      case NoiseSpec::Kind::none: break;
      case NoiseSpec::Kind::gaussian:
        for (Eigen::Index i = 0; i < dd; ++i) z(i) = normal(rng);
        x += root * z;
        break;
      case NoiseSpec::Kind::uniform_box:
        for (Eigen::Index i = 0; i < dd; ++i) x(i) += noise.scale(i) * unit(rng);
        break;
      case NoiseSpec::Kind::laplace:
        for (Eigen::Index i = 0; i < dd; ++i) {
          const double a = expo(rng);
          const double b = expo(rng);
          x(i) += noise.scale(i) * (a - b);
        }
        break;
    }
    rows.row(r) = x.transpose();
  }
  return SampleSet(std::move(rows));
}

SymTensor3 perturb_tensor(const SymTensor3& t, double eps_in, std::uint64_t seed) {
  require(eps_in >= 0.0 && std::isfinite(eps_in), ErrorCode::invalid_argument, "eps_in must be >= 0");
  if (eps_in == 0.0) return t;
  const std::size_t d = t.dim();
  Rng rng(derive_seed(seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    std::vector<double> g(d * d * d);
    for (double& v : g) v = normal(rng);
    const SymTensor3 noise(d, std::move(g));
    const double norm = noise.frobenius_norm();
    if (norm > 0.0) return t + noise * (eps_in / norm);
  }
}

Matrix random_rotation(std::size_t d, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0));
  Matrix g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < g.cols(); ++c) g.col(c) = gaussian_vector(d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < q.cols(); ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

}  // namespace otd
