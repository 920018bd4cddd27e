#include <catch2/catch_amalgamated.hpp>

#include "otd/error.hpp"
#include "otd/tensor.hpp"
#include "support.hpp"

using namespace otd;
using Catch::Approx;

namespace {

SymTensor3 random_tensor(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> e(d * d * d);
  for (auto& v : e) v = n(rng);
  return SymTensor3(d, std::move(e));
}

Vector basis(std::size_t d, std::size_t i) { return Vector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i)); }

SymTensor3 e1_cubed(std::size_t d) { return from_components(ComponentMatrix(Matrix(basis(d, 0)))); }

}  // namespace

TEST_CASE("constructor symmetrizes and reads are permutation invariant", "[tensor]") {
  std::mt19937_64 rng(1);
  const std::size_t d = 4;
  const SymTensor3 t = random_tensor(d, rng);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        const double v = t(i, j, k);
        CHECK(t(i, k, j) == v);
        CHECK(t(j, i, k) == v);
        CHECK(t(j, k, i) == v);
        CHECK(t(k, i, j) == v);
        CHECK(t(k, j, i) == v);
      }
}

TEST_CASE("constructor rejects bad input", "[tensor]") {
  CHECK_THROWS_AS(SymTensor3(2, std::vector<double>(7, 0.0)), Error);
  std::vector<double> e(8, 0.0);
  e[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SymTensor3(2, e), Error);
  CHECK_THROWS_AS(ComponentMatrix(Matrix::Constant(2, 2, std::numeric_limits<double>::infinity())), Error);
}

TEST_CASE("from_components examples", "[tensor]") {
  SECTION("single basis vector") {
    const SymTensor3 t = from_components(ComponentMatrix(Matrix(basis(2, 0))), Vector::Ones(1));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 2; ++k) CHECK(t(i, j, k) == ((i + j + k == 0) ? 1.0 : 0.0));
  }
  SECTION("diagonal tensor with signed scales") {
    const SymTensor3 t = from_components(ComponentMatrix(Matrix::Identity(2, 2)), Vector((Vector(2) << 1.0, -1.0).finished()));
    CHECK(t(0, 0, 0) == 1.0);
    CHECK(t(1, 1, 1) == -1.0);
    CHECK(t(0, 0, 1) == 0.0);
    CHECK(t(0, 1, 1) == 0.0);
  }
  SECTION("random d=3 n=2 matches triple loop") {
    std::mt19937_64 rng(7);
    const Matrix a = oracle::gaussian_matrix(3, 2, rng);
    const Vector s = (Vector(2) << 2.0, 3.0).finished();
    const SymTensor3 t = from_components(ComponentMatrix(a), s);
    const auto ref = oracle::rank_one_sum(a, s);
    CHECK(oracle::frobenius(std::vector<double>(t.entries().begin(), t.entries().end()), ref) <= 1e-12);
  }
}

TEST_CASE("from_components agrees with triple loop up to d=10, n=12", "[tensor][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = std::uniform_int_distribution<int>(1, 10)(rng);
    const auto n = std::uniform_int_distribution<int>(1, 12)(rng);
    const Matrix a = oracle::unit_columns(d, n, rng);
    const Vector s = oracle::gaussian_matrix(n, 1, rng);
    const SymTensor3 t = from_components(ComponentMatrix(a), s);
    const auto ref = oracle::rank_one_sum(a, s);
    CHECK(oracle::frobenius(std::vector<double>(t.entries().begin(), t.entries().end()), ref) <= 1e-12);
  }
}

TEST_CASE("contract examples", "[tensor]") {
  const SymTensor3 t = e1_cubed(2);
  CHECK((contract(t, basis(2, 0)) - basis(2, 0) * basis(2, 0).transpose()).norm() == 0.0);
  CHECK(contract(t, basis(2, 1)).norm() == 0.0);

  std::mt19937_64 rng(3);
  const Vector a = oracle::gaussian_matrix(4, 1, rng);
  const SymTensor3 ta = from_components(ComponentMatrix(Matrix(a)));
  for (int trial = 0; trial < 5; ++trial) {
    const Vector x = oracle::gaussian_matrix(4, 1, rng);
    const Matrix expected = x.dot(a) * a * a.transpose();
    CHECK((contract(ta, x) - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("contract is symmetric and linear", "[tensor][property]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 7;
    const SymTensor3 t = random_tensor(d, rng);
    const SymTensor3 s = random_tensor(d, rng);
    const Vector x = oracle::gaussian_matrix(static_cast<Eigen::Index>(d), 1, rng);
    const Matrix tx = contract(t, x);
    CHECK((tx - tx.transpose()).norm() <= 1e-14 * std::max(1.0, tx.norm()));
    CHECK((contract(t + s, x) - tx - contract(s, x)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("trilinear examples and consistency with contract", "[tensor]") {
  const SymTensor3 t = e1_cubed(3);
  const Vector e1 = basis(3, 0), e2 = basis(3, 1);
  CHECK(trilinear(t, e1, e1, e1) == 1.0);
  CHECK(trilinear(t, e1, e2, e1) == 0.0);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const SymTensor3 r = random_tensor(5, rng);
    const Vector x = oracle::gaussian_matrix(5, 1, rng);
    const Vector u = oracle::gaussian_matrix(5, 1, rng);
    const Vector v = oracle::gaussian_matrix(5, 1, rng);
    CHECK(trilinear(r, x, u, v) == Approx(u.dot(contract(r, x) * v)).margin(1e-12));
    CHECK(trilinear(r, x, u, u) == Approx(u.dot(contract(r, x) * u)).margin(1e-12));
  }
}

TEST_CASE("frobenius_distance examples", "[tensor]") {
  const SymTensor3 t = e1_cubed(3);
  CHECK(frobenius_distance(t, t) == 0.0);
  CHECK(frobenius_distance(t, SymTensor3::zeros(3)) == 1.0);

  std::mt19937_64 rng(13);
  const SymTensor3 a = random_tensor(4, rng), b = random_tensor(4, rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) acc += std::pow(a(i, j, k) - b(i, j, k), 2);
  CHECK(frobenius_distance(a, b) == Approx(std::sqrt(acc)).epsilon(1e-14));
  CHECK_THROWS_AS(frobenius_distance(a, SymTensor3::zeros(3)), Error);
}

TEST_CASE("deflate examples", "[tensor]") {
  std::mt19937_64 rng(17);
  const Matrix a = oracle::unit_columns(5, 4, rng);
  const Vector s = (Vector(4) << 1.0, -2.0, 0.5, 3.0).finished();
  const ComponentMatrix comps(a);
  const SymTensor3 t = from_components(comps, s);
  CHECK(deflate(t, comps, s).frobenius_norm() <= 1e-12);
  CHECK(frobenius_distance(deflate(t, ComponentMatrix::empty(5), Vector(0)), t) == 0.0);

  const SymTensor3 r = random_tensor(5, rng);
  const auto sub = oracle::rank_one_sum(a, s);
  const SymTensor3 out = deflate(r, comps, s);
  std::vector<double> expected(r.entries().begin(), r.entries().end());
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] -= sub[i];
  CHECK(oracle::frobenius(std::vector<double>(out.entries().begin(), out.entries().end()), expected) <= 1e-12);
}

TEST_CASE("unfold lays out mode-1 slices", "[tensor]") {
  std::mt19937_64 rng(19);
  const SymTensor3 t = random_tensor(3, rng);
  const Matrix u = unfold(t);
  REQUIRE(u.rows() == 3);
  REQUIRE(u.cols() == 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j * 3 + k)) == t(i, j, k));
}

TEST_CASE("component matrix slicing", "[tensor]") {
  const ComponentMatrix a(Matrix::Identity(3, 3));
  const ComponentMatrix s = a.slice(1, 2);
  CHECK(s.count() == 2);
  CHECK(s.column(0) == basis(3, 1));
  CHECK(a.append(s).count() == 5);
  CHECK_THROWS_AS(a.slice(2, 2), Error);
  CHECK_THROWS_AS(a.append(ComponentMatrix(Matrix::Identity(2, 2))), Error);
}

TEST_CASE("reconstructing from symmetric entries is exact", "[tensor]") {
  std::mt19937_64 rng(23);
  const SymTensor3 t = from_components(ComponentMatrix(oracle::unit_columns(4, 5, rng)));
  const SymTensor3 again(4, std::vector<double>(t.entries().begin(), t.entries().end()));
  CHECK(frobenius_distance(t, again) == 0.0);
}
