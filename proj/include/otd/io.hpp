#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "otd/cumulants.hpp"
#include "otd/decompose.hpp"
#include "otd/mixtures.hpp"
#include "otd/synth.hpp"
#include "otd/tensor.hpp"

namespace otd::io {

using Json = nlohmann::ordered_json;

// Tensor: {"dim": d, "entries": [d^3 reals, row-major (i,j,k)]}
Json to_json(const SymTensor3& t);
SymTensor3 tensor_from_json(const Json& j);

// Components: {"dim": d, "count": n, "columns": [[...], ...]}
Json to_json(const ComponentMatrix& a);
ComponentMatrix components_from_json(const Json& j);

// Samples: {"dim": d, "rows": [[...], ...]}
Json to_json(const SampleSet& s);
SampleSet samples_from_json(const Json& j);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);  // list of rows
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

Json to_json(const MatchReport& r);
Json to_json(const DecompositionResult& r);
Json to_json(const DecompositionDiagnostics& d);
Json to_json(const DeconvolutionDiagnostics& d, bool include_centered);

/// {"weights": [...], "means": [[...]], "covariance": [[...]] (optional), "diagnostics": {...}}
Json params_to_json(const DiscreteMixtureParams& p, const Matrix* covariance);
DiscreteMixtureParams mixture_from_json(const Json& j);

/// CSV, one sample per row; a non-numeric first line is treated as a header.
SampleSet read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(const std::filesystem::path& path, const SampleSet& s);

/// Dispatches on extension: .json -> JSON format, anything else -> CSV.
SampleSet read_samples(const std::filesystem::path& path);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Library version string recorded in manifests.
std::string_view version();

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace otd::io
