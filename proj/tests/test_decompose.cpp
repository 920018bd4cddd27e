#include <catch2/catch_amalgamated.hpp>

#include "otd/decompose.hpp"
#include "otd/error.hpp"
#include "otd/random.hpp"
#include "support.hpp"

using namespace otd;
using Catch::Approx;

namespace {

// a_1..a_d random unit columns with sigma_d >= 0.2, a_{d+1} = -(sum a_i) / ||sum a_i||.
Matrix negative_sum_instance(int d, std::mt19937_64& rng) {
  for (;;) {
    const Matrix a = oracle::unit_columns(d, d, rng);
    if (oracle::gram_singular_values(a)(d - 1) < 0.2) continue;
    Matrix out(d, d + 1);
    out.leftCols(d) = a;
    out.col(d) = -a.rowwise().sum().normalized();
    return out;
  }
}

SymTensor3 tensor_of(const Matrix& a) { return from_components(ComponentMatrix(a)); }

SymTensor3 noisy(const SymTensor3& t, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> e(t.entries().size());
  for (auto& v : e) v = n(rng);
  const SymTensor3 g(t.dim(), std::move(e));
  return t + g * (eps / g.frobenius_norm());
}

}  // namespace

TEST_CASE("estimate_scales examples", "[decompose]") {
  SECTION("orthonormal pair") {
    const ComponentMatrix a(Matrix::Identity(2, 2));
    const Vector x = Vector::Constant(2, 1.0 / std::sqrt(2.0));
    const Vector xi = estimate_scales(from_components(a), x, a);
    CHECK(xi(0) == Approx(1.0).epsilon(1e-14));
    CHECK(xi(1) == Approx(1.0).epsilon(1e-14));
  }
  SECTION("constructed scales 8 and 27") {
    std::mt19937_64 rng(31);
    const ComponentMatrix a(oracle::unit_columns(4, 2, rng));
    const SymTensor3 t = from_components(a, Vector((Vector(2) << 8.0, 27.0).finished()));
    Rng r(5);
    const Vector x = random_unit_vector(4, r);
    const Vector xi = estimate_scales(t, x, a);
    CHECK(std::abs(xi(0) - 8.0) <= 1e-10);
    CHECK(std::abs(xi(1) - 27.0) <= 1e-10);
  }
  SECTION("duplicated column") {
    Matrix m(3, 2);
    m.col(0) = Vector::Unit(3, 0);
    m.col(1) = Vector::Unit(3, 0);
    const ComponentMatrix a(m);
    try {
      (void)estimate_scales(from_components(a), Vector::Constant(3, 1.0 / std::sqrt(3.0)), a);
      FAIL("expected RankDeficientComponents");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::rank_deficient_components);
    }
  }
}

TEST_CASE("orthonormal noiseless tensor", "[decompose]") {
  const SymTensor3 t = from_components(ComponentMatrix(Matrix::Identity(4, 4)));
  DecompositionConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.rank_n = 4;
  cfg.seed = 1;
  const DecompositionResult r = decompose(t, cfg);
  CHECK(oracle::brute_force_match(Matrix::Identity(4, 4), r.components.matrix()).max <= 1e-8);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(r.scales_xi(i) == Approx(1.0).epsilon(1e-8));
  CHECK(r.attempts_used <= 3);
  CHECK(r.residual_frobenius <= 1e-8);
}

TEST_CASE("overcomplete d=6 n=7 instance", "[decompose]") {
  std::mt19937_64 rng(41);
  const Matrix a = negative_sum_instance(6, rng);
  DecompositionConfig cfg;
  cfg.epsilon = 1e-6;
  cfg.rank_n = 7;
  cfg.overcompleteness_k = 1;
  cfg.seed = 3;
  const DecompositionResult r = decompose(tensor_of(a), cfg);
  CHECK(oracle::brute_force_match(a, r.components.matrix()).max <= 1e-4);
  CHECK(satisfies_termination(r, cfg));

  SECTION("with input noise 1e-8 and epsilon 1e-5") {
    DecompositionConfig loose = cfg;
    loose.epsilon = 1e-5;
    const DecompositionResult rn = decompose(noisy(tensor_of(a), 1e-8, 77), loose);
    CHECK(oracle::brute_force_match(a, rn.components.matrix()).max <= 1e-3);
  }
}

TEST_CASE("results satisfy termination and reconstruct from their fields", "[decompose][property]") {
  std::size_t returned = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    std::mt19937_64 rng(100 + seed);
    const Matrix a = negative_sum_instance(5, rng);
    DecompositionConfig cfg;
    cfg.epsilon = 1e-6;
    cfg.rank_n = 6;
    cfg.overcompleteness_k = 1;
    cfg.seed = seed;
    const SymTensor3 t = tensor_of(a);
    std::optional<DecompositionResult> got;
    try {
      got = decompose(t, cfg);
    } catch (const AttemptsExhausted&) {
      continue;  // soundness concerns returned results only
    }
    ++returned;
    const DecompositionResult& r = *got;
    INFO("seed " << seed);
    CHECK(r.residual_frobenius <= cfg.epsilon);
    CHECK(std::cbrt(r.scales_xi.cwiseAbs().maxCoeff()) <= 2.0 * cfg.norm_bound_M);
    CHECK(satisfies_termination(r, cfg));
    const SymTensor3 from_xi = from_components(r.directions, r.scales_xi);
    CHECK(frobenius_distance(from_components(r.components), from_xi) <= 1e-10);
    CHECK(frobenius_distance(from_xi, t) == Approx(r.residual_frobenius).margin(1e-12));
    for (std::size_t i = 0; i < r.directions.count(); ++i)
      CHECK(std::abs(r.directions.column(i).norm() - 1.0) <= 1e-12);
  }
  CHECK(returned >= 6);
}

TEST_CASE("same seed gives the same result for any thread count", "[decompose][property]") {
  std::mt19937_64 rng(51);
  const Matrix a = negative_sum_instance(5, rng);
  const SymTensor3 t = tensor_of(a);
  for (const ProbeStrategy probe : {ProbeStrategy::refined, ProbeStrategy::uniform}) {
    DecompositionConfig cfg;
    cfg.epsilon = probe == ProbeStrategy::refined ? 1e-6 : 1e-2;
    cfg.rank_n = 6;
    cfg.overcompleteness_k = 1;
    cfg.seed = 9;
    cfg.probe_strategy = probe;
    const DecompositionResult r1 = decompose(t, cfg);
    const DecompositionResult r2 = decompose(t, cfg);
    cfg.threads = 4;
    const DecompositionResult r4 = decompose(t, cfg);
    for (const auto* other : {&r2, &r4}) {
      CHECK(other->attempts_used == r1.attempts_used);
      CHECK(other->components.matrix() == r1.components.matrix());
      CHECK(other->scales_xi == r1.scales_xi);
      CHECK(other->residual_frobenius == r1.residual_frobenius);
      CHECK(other->failed_attempts == r1.failed_attempts);
    }
  }
}

TEST_CASE("noiseless orthonormal tensors succeed within 10 attempts", "[decompose][property]") {
  std::size_t ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(500 + seed);
    const int d = 3 + static_cast<int>(seed % 5);
    const Matrix q = Eigen::HouseholderQR<Matrix>(oracle::gaussian_matrix(d, d, rng)).householderQ();
    DecompositionConfig cfg;
    cfg.epsilon = 1e-8;
    cfg.rank_n = static_cast<std::size_t>(d);
    cfg.seed = seed;
    cfg.max_attempts = 10;
    try {
      const DecompositionResult r = decompose(tensor_of(q), cfg);
      if (r.residual_frobenius <= 1e-8) ++ok;
    } catch (const AttemptsExhausted&) {
    }
  }
  CHECK(ok >= 99);
}

TEST_CASE("unattainable tolerance reports best-so-far diagnostics", "[decompose]") {
  std::mt19937_64 rng(61);
  const Matrix a = negative_sum_instance(4, rng);
  DecompositionConfig cfg;
  cfg.epsilon = 0.0;
  cfg.rank_n = 5;
  cfg.overcompleteness_k = 1;
  cfg.seed = 2;
  cfg.max_attempts = 40;
  try {
    (void)decompose(noisy(tensor_of(a), 1e-3, 5), cfg);
    FAIL("expected AttemptsExhausted");
  } catch (const AttemptsExhausted& e) {
    CHECK(e.code() == ErrorCode::attempts_exhausted);
    const auto& diag = e.diagnostics();
    CHECK(diag.attempts == 40);
    REQUIRE(diag.best_residual.has_value());
    REQUIRE(diag.best.has_value());
    CHECK(*diag.best_residual > 0.0);
    CHECK(diag.best->residual_frobenius == *diag.best_residual);
    std::size_t failed = 0;
    for (const auto& [code, count] : diag.failed_attempts) failed += count;
    CHECK(diag.completed_attempts + failed == diag.attempts);
  }
}

TEST_CASE("configuration validation", "[decompose]") {
  const SymTensor3 t = from_components(ComponentMatrix(Matrix::Identity(3, 3)));
  auto expect_invalid = [&](DecompositionConfig cfg) {
    try {
      (void)decompose(t, cfg);
      FAIL("expected invalid_argument");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_argument);
    }
  };
  DecompositionConfig base;
  base.rank_n = 3;
  auto c = base;
  c.epsilon = -1.0;
  expect_invalid(c);
  c = base;
  c.norm_bound_M = 0.0;
  expect_invalid(c);
  c = base;
  c.overcompleteness_k = 3;
  expect_invalid(c);
  c = base;
  c.rank_n = 4;
  expect_invalid(c);
  c = base;
  c.max_attempts = 0;
  expect_invalid(c);
}

TEST_CASE("norm bound rejects oversized components", "[decompose]") {
  const Matrix a = 3.0 * Matrix::Identity(3, 3);
  DecompositionConfig cfg;
  cfg.rank_n = 3;
  cfg.norm_bound_M = 1.0;  // |xi|^{1/3} = 3 > 2M
  cfg.max_attempts = 8;
  CHECK_THROWS_AS(decompose(tensor_of(a), cfg), AttemptsExhausted);
  cfg.norm_bound_M = 2.0;
  CHECK(decompose(tensor_of(a), cfg).scales_xi.maxCoeff() == Approx(27.0));
}

TEST_CASE("negative components keep their sign", "[decompose]") {
  Matrix a = Matrix::Identity(3, 3);
  a.col(1) *= -1.0;
  DecompositionConfig cfg;
  cfg.rank_n = 3;
  cfg.epsilon = 1e-10;
  const DecompositionResult r = decompose(tensor_of(a), cfg);
  CHECK(oracle::brute_force_match(a, r.components.matrix()).max <= 1e-10);
}

TEST_CASE("probe strategy names round trip", "[decompose]") {
  for (const ProbeStrategy s : {ProbeStrategy::uniform, ProbeStrategy::refined})
    CHECK(probe_strategy_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(probe_strategy_from_string("greedy"), Error);
}
