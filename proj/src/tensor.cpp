#include "otd/tensor.hpp"

#include <cmath>
#include <string>

#include "otd/error.hpp"

namespace otd {

namespace {

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    require(std::isfinite(v), ErrorCode::invalid_argument, std::string(what) + " has non-finite entries");
}

// Visits every sorted triple i <= j <= k together with its distinct permutations.
template <typename F>
void for_each_orbit(std::size_t d, F&& f) {
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j)
      for (std::size_t k = j; k < d; ++k) f(i, j, k);
}

void scatter(std::vector<double>& e, std::size_t d, std::size_t i, std::size_t j, std::size_t k,
             double value) {
  auto at = [&](std::size_t a, std::size_t b, std::size_t c) -> double& { return e[(a * d + b) * d + c]; };
  at(i, j, k) = value;
  at(i, k, j) = value;
  at(j, i, k) = value;
  at(j, k, i) = value;
  at(k, i, j) = value;
  at(k, j, i) = value;
}

}  // namespace

ComponentMatrix::ComponentMatrix(Matrix columns) : columns_(std::move(columns)) {
  require(columns_.rows() > 0, ErrorCode::invalid_argument, "component matrix needs dim >= 1");
  require_finite({columns_.data(), static_cast<std::size_t>(columns_.size())}, "component matrix");
}

ComponentMatrix ComponentMatrix::empty(std::size_t dim) {
  ComponentMatrix out;
  out.columns_ = Matrix(static_cast<Eigen::Index>(dim), 0);
  return out;
}

ComponentMatrix ComponentMatrix::slice(std::size_t first, std::size_t n) const {
  require(first + n <= count(), ErrorCode::dimension_mismatch, "column slice out of range");
  if (n == 0) return empty(dim());
  return ComponentMatrix(columns_.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(n)));
}

ComponentMatrix ComponentMatrix::append(const ComponentMatrix& other) const {
  require(other.dim() == dim(), ErrorCode::dimension_mismatch, "append: " + dims(dim(), other.dim()));
  Matrix m(columns_.rows(), columns_.cols() + other.columns_.cols());
  m << columns_, other.columns_;
  ComponentMatrix out;
  out.columns_ = std::move(m);
  return out;
}

SymTensor3::SymTensor3(std::size_t dim, std::vector<double> entries) : dim_(dim) {
  require(dim > 0, ErrorCode::invalid_argument, "tensor dim must be positive");
  require(entries.size() == dim * dim * dim, ErrorCode::dimension_mismatch,
          "tensor entries: expected " + std::to_string(dim * dim * dim) + ", got " +
              std::to_string(entries.size()));
  require_finite(entries, "tensor");

  const std::size_t d = dim;
  auto at = [&](std::size_t a, std::size_t b, std::size_t c) { return entries[(a * d + b) * d + c]; };
  entries_.assign(d * d * d, 0.0);
  for_each_orbit(d, [&](std::size_t i, std::size_t j, std::size_t k) {
    // Offsets from one representative, so already-symmetric input is kept bit for bit.
    const double base = at(i, j, k);
    const double mean = base + ((at(i, k, j) - base) + (at(j, i, k) - base) + (at(j, k, i) - base) +
                                (at(k, i, j) - base) + (at(k, j, i) - base)) /
                                   6.0;
    scatter(entries_, d, i, j, k, mean);
  });
}

SymTensor3 SymTensor3::zeros(std::size_t dim) {
  require(dim > 0, ErrorCode::invalid_argument, "tensor dim must be positive");
  return SymTensor3(Trusted{}, dim, std::vector<double>(dim * dim * dim, 0.0));
}

double SymTensor3::frobenius_norm() const {
  double s = 0.0;
  for (double v : entries_) s += v * v;
  return std::sqrt(s);
}

SymTensor3 SymTensor3::operator+(const SymTensor3& other) const {
  require(dim_ == other.dim_, ErrorCode::dimension_mismatch, "tensor add: " + dims(dim_, other.dim_));
  std::vector<double> e(entries_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = entries_[i] + other.entries_[i];
  return SymTensor3(Trusted{}, dim_, std::move(e));
}

SymTensor3 SymTensor3::operator-(const SymTensor3& other) const {
  require(dim_ == other.dim_, ErrorCode::dimension_mismatch, "tensor subtract: " + dims(dim_, other.dim_));
  std::vector<double> e(entries_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = entries_[i] - other.entries_[i];
  return SymTensor3(Trusted{}, dim_, std::move(e));
}

SymTensor3 SymTensor3::operator*(double s) const {
  std::vector<double> e(entries_);
  for (double& v : e) v *= s;
  return SymTensor3(Trusted{}, dim_, std::move(e));
}

SymTensor3 from_components(const ComponentMatrix& a, std::span<const double> scales) {
  const std::size_t d = a.dim();
  const std::size_t n = a.count();
  require(scales.empty() || scales.size() == n, ErrorCode::dimension_mismatch,
          "from_components: scales " + dims(scales.size(), n));
  require_finite(scales, "scales");

  const Matrix& m = a.matrix();
  std::vector<double> e(d * d * d, 0.0);
  for_each_orbit(d, [&](std::size_t i, std::size_t j, std::size_t k) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      const double w = scales.empty() ? 1.0 : scales[c];
      s += w * m(static_cast<Eigen::Index>(i), col) * m(static_cast<Eigen::Index>(j), col) *
           m(static_cast<Eigen::Index>(k), col);
    }
    scatter(e, d, i, j, k, s);
  });
  return SymTensor3(SymTensor3::Trusted{}, d, std::move(e));
}

Matrix contract(const SymTensor3& t, const Vector& x) {
  const std::size_t d = t.dim();
  require(static_cast<std::size_t>(x.size()) == d, ErrorCode::dimension_mismatch,
          "contract: " + dims(static_cast<std::size_t>(x.size()), d));
  const auto e = t.entries();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = x(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) += e[(i * d + j) * d + k] * xi;
  }
  // Accumulation order differs between (j,k) and (k,j) only through identical
  // operands, so `out` is already exactly symmetric.
  return out;
}

double trilinear(const SymTensor3& t, const Vector& x, const Vector& u, const Vector& v) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  require(x.size() == d && u.size() == d && v.size() == d, ErrorCode::dimension_mismatch,
          "trilinear: vector lengths must equal tensor dim");
  return u.dot(contract(t, x) * v);
}

double frobenius_distance(const SymTensor3& t, const SymTensor3& s) {
  require(t.dim() == s.dim(), ErrorCode::dimension_mismatch, "frobenius_distance: " + dims(t.dim(), s.dim()));
  double acc = 0.0;
  const auto a = t.entries();
  const auto b = s.entries();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

SymTensor3 deflate(const SymTensor3& t, const ComponentMatrix& a, const Vector& scales) {
  require(a.dim() == t.dim(), ErrorCode::dimension_mismatch, "deflate: " + dims(a.dim(), t.dim()));
  require(static_cast<std::size_t>(scales.size()) == a.count(), ErrorCode::dimension_mismatch,
          "deflate: scales " + dims(static_cast<std::size_t>(scales.size()), a.count()));
  if (a.count() == 0) return t;
  return t - from_components(a, scales);
}

Matrix unfold(const SymTensor3& t) {
  const auto d = static_cast<Eigen::Index>(t.dim());
  // Row-major storage of (i, (j,k)) is exactly the mode-1 unfolding.
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      t.entries().data(), d, d * d);
}

}  // namespace otd
