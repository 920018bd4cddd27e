#include "otd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "otd/error.hpp"

namespace otd::io {

namespace {

void expect(bool ok, const std::string& what) { require(ok, ErrorCode::io, what); }

std::size_t positive_size(const Json& j, const char* key) {
  expect(j.is_object() && j.contains(key) && j.at(key).is_number_integer() && j.at(key).get<long long>() > 0,
         std::string("expected positive integer field '") + key + "'");
  return j.at(key).get<std::size_t>();
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  expect(j.is_array(), what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    expect(v.is_number(), what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Json map_failures(const std::map<ErrorCode, std::size_t>& m) {
  Json j = Json::object();
  for (const auto& [code, count] : m) j[std::string(to_string(code))] = count;
  return j;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_row(const std::string& line, std::vector<double>& row) {
  row.clear();
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field(line.data() + start, (comma == std::string::npos ? line.size() : comma) - start);
    double v = 0.0;
    if (!parse_double(field, v)) return false;
    row.push_back(v);
    if (comma == std::string::npos) return true;
    start = comma + 1;
  }
}

}  // namespace

std::string_view version() { return OTD_VERSION; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json to_json(const SymTensor3& t) {
  return Json{{"dim", t.dim()}, {"entries", std::vector<double>(t.entries().begin(), t.entries().end())}};
}

SymTensor3 tensor_from_json(const Json& j) {
  const std::size_t d = positive_size(j, "dim");
  expect(j.contains("entries"), "tensor: missing 'entries'");
  std::vector<double> e = numbers(j.at("entries"), "tensor entries");
  expect(e.size() == d * d * d, "tensor: expected d^3 = " + std::to_string(d * d * d) + " entries");
  try {
    return SymTensor3(d, std::move(e));
  } catch (const Error& err) {
    throw Error(ErrorCode::io, std::string("tensor: ") + err.what());
  }
}

Json to_json(const ComponentMatrix& a) {
  Json cols = Json::array();
  for (std::size_t c = 0; c < a.count(); ++c) cols.push_back(to_json(a.column(c)));
  return Json{{"dim", a.dim()}, {"count", a.count()}, {"columns", cols}};
}

ComponentMatrix components_from_json(const Json& j) {
  const std::size_t d = positive_size(j, "dim");
  const std::size_t n = positive_size(j, "count");
  expect(j.contains("columns") && j.at("columns").is_array() && j.at("columns").size() == n,
         "components: 'columns' must hold count entries");
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (std::size_t c = 0; c < n; ++c) {
    const auto col = numbers(j.at("columns").at(c), "component column");
    expect(col.size() == d, "components: column length must equal dim");
    for (std::size_t r = 0; r < d; ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
  }
  expect(m.allFinite(), "components: non-finite entries");
  return ComponentMatrix(std::move(m));
}

Json to_json(const SampleSet& s) {
  return Json{{"dim", s.dim()}, {"rows", to_json(s.rows())}};
}

SampleSet samples_from_json(const Json& j) {
  const std::size_t d = positive_size(j, "dim");
  expect(j.contains("rows"), "samples: missing 'rows'");
  Matrix m = matrix_from_json(j.at("rows"));
  expect(m.rows() >= 1 && static_cast<std::size_t>(m.cols()) == d, "samples: rows must have dim entries");
  expect(m.allFinite(), "samples: non-finite entries");
  return SampleSet(std::move(m));
}

Json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

Vector vector_from_json(const Json& j) {
  const auto v = numbers(j, "vector");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix matrix_from_json(const Json& j) {
  expect(j.is_array(), "matrix must be an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = numbers(j.at(0), "matrix row").size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = numbers(j.at(r), "matrix row");
    expect(row.size() == cols, "matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

Json to_json(const MatchReport& r) {
  return Json{{"permutation", r.permutation},
              {"per_component_error", to_json(r.per_component_error)},
              {"max_error", r.max_error},
              {"mean_error", r.mean_error},
              {"total_error", r.total_error}};
}

Json to_json(const DecompositionResult& r) {
  Json probes{{"x", to_json(r.probes.x)}, {"y", to_json(r.probes.y)}};
  if (r.probes.x_prime.size() > 0) {
    probes["x_prime"] = to_json(r.probes.x_prime);
    probes["y_prime"] = to_json(r.probes.y_prime);
  }
  return Json{{"components", to_json(r.components)},
              {"directions", to_json(r.directions)},
              {"scales_xi", to_json(r.scales_xi)},
              {"residual_frobenius", r.residual_frobenius},
              {"attempts_used", r.attempts_used},
              {"failed_attempts", map_failures(r.failed_attempts)},
              {"probes", probes}};
}

Json to_json(const DecompositionDiagnostics& d) {
  Json j{{"attempts", d.attempts},
         {"completed_attempts", d.completed_attempts},
         {"failed_attempts", map_failures(d.failed_attempts)}};
  j["best_residual"] = d.best_residual ? Json(*d.best_residual) : Json(nullptr);
  j["best_max_cbrt_xi"] = d.best_max_cbrt_xi ? Json(*d.best_max_cbrt_xi) : Json(nullptr);
  if (d.best) j["best"] = to_json(*d.best);
  return j;
}

Json to_json(const DeconvolutionDiagnostics& d, bool include_centered) {
  Json j{{"sample_mean", to_json(d.sample_mean)},
         {"epsilon", d.epsilon},
         {"k3_norm", d.k3_norm},
         {"k3_standard_error", d.k3_standard_error},
         {"residual_frobenius", d.residual_frobenius},
         {"attempts_used", d.attempts_used},
         {"failed_attempts", map_failures(d.failed_attempts)},
         {"scales_xi", to_json(d.scales_xi)},
         {"null_vector", to_json(d.null_vector)},
         {"singular_values", to_json(d.singular_values)},
         {"mean_constraint_norm", d.mean_constraint_norm},
         {"below_weight_floor", d.below_weight_floor},
         {"above_norm_bound", d.above_norm_bound}};
  j["robust_kruskal_rank"] = d.robust_kruskal_rank ? Json(*d.robust_kruskal_rank) : Json(nullptr);
  if (include_centered) {
    Json means = Json::array();
    for (std::size_t c = 0; c < d.centered_means.count(); ++c) means.push_back(to_json(d.centered_means.column(c)));
    j["centered_means"] = means;
    j["directions"] = to_json(d.directions);
  }
  return j;
}

Json params_to_json(const DiscreteMixtureParams& p, const Matrix* covariance) {
  Json means = Json::array();
  for (std::size_t c = 0; c < p.count(); ++c) means.push_back(to_json(p.means().column(c)));
  Json j{{"weights", to_json(p.weights())}, {"means", means}};
  if (covariance) j["covariance"] = to_json(*covariance);
  return j;
}

DiscreteMixtureParams mixture_from_json(const Json& j) {
  expect(j.is_object() && j.contains("weights") && j.contains("means"), "params: need 'weights' and 'means'");
  const Vector w = vector_from_json(j.at("weights"));
  const Matrix rows = matrix_from_json(j.at("means"));
  expect(rows.rows() == w.size() && rows.cols() >= 1, "params: one mean per weight required");
  try {
    return DiscreteMixtureParams(w, ComponentMatrix(rows.transpose()));
  } catch (const Error& err) {
    throw Error(ErrorCode::io, std::string("params: ") + err.what());
  }
}

SampleSet read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  expect(static_cast<bool>(in), "cannot open samples file '" + path.string() + "'");
  std::vector<double> flat;
  std::vector<double> row;
  std::string line;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      expect(dim == 0 && flat.empty() && line_no == 1, "samples: malformed row at line " + std::to_string(line_no));
      continue;  // header
    }
    if (dim == 0) dim = row.size();
    expect(row.size() == dim, "samples: inconsistent column count at line " + std::to_string(line_no));
    flat.insert(flat.end(), row.begin(), row.end());
  }
  expect(dim > 0 && !flat.empty(), "samples: no data rows in '" + path.string() + "'");
  const auto n = static_cast<Eigen::Index>(flat.size() / dim);
  Matrix m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), n, static_cast<Eigen::Index>(dim));
  expect(m.allFinite(), "samples: non-finite entries");
  return SampleSet(std::move(m));
}

void write_samples_csv(const std::filesystem::path& path, const SampleSet& s) {
  std::ofstream out(path, std::ios::binary);
  expect(static_cast<bool>(out), "cannot write '" + path.string() + "'");
  std::string line;
  for (Eigen::Index r = 0; r < s.rows().rows(); ++r) {
    line.clear();
    for (Eigen::Index c = 0; c < s.rows().cols(); ++c) {
      if (c) line += ',';
      line += format_double(s.rows()(r, c));
    }
    line += '\n';
    out << line;
  }
  expect(static_cast<bool>(out), "write failed for '" + path.string() + "'");
}

SampleSet read_samples(const std::filesystem::path& path) {
  if (path.extension() == ".json") return samples_from_json(read_json(path));
  return read_samples_csv(path);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  expect(static_cast<bool>(in), "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io, "malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  expect(static_cast<bool>(out), "cannot write '" + path.string() + "'");
  out << text;
  expect(static_cast<bool>(out), "write failed for '" + path.string() + "'");
}

}  // namespace otd::io
