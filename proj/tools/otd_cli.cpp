// otd: command-line driver for synthetic experiments, tensor decomposition,
// blind deconvolution and shared-covariance GMM estimation.
//
// Exit codes: 0 success, 1 input or usage error, 2 algorithmic failure.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otd/decompose.hpp"
#include "otd/error.hpp"
#include "otd/io.hpp"
#include "otd/mixtures.hpp"
#include "otd/random.hpp"
#include "otd/synth.hpp"

namespace fs = std::filesystem;
using otd::io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitAlgorithm = 2;

bool is_input_error(otd::ErrorCode c) {
  return c == otd::ErrorCode::invalid_argument || c == otd::ErrorCode::dimension_mismatch ||
         c == otd::ErrorCode::io;
}

std::size_t default_threads() {
  if (const char* env = std::getenv("OTD_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

// Loads a component matrix from either a components file or a params file (means).
struct ComponentsFile {
  otd::ComponentMatrix components;
  std::optional<otd::Vector> weights;
};

ComponentsFile load_components(const fs::path& path) {
  const Json j = otd::io::read_json(path);
  if (j.is_object() && j.contains("columns")) return {otd::io::components_from_json(j), std::nullopt};
  if (j.is_object() && j.contains("weights")) {
    const auto p = otd::io::mixture_from_json(j);
    return {p.means(), p.weights()};
  }
  throw otd::Error(otd::ErrorCode::io, "'" + path.string() + "' is neither a components nor a params file");
}

Json match_json(const ComponentsFile& truth, const otd::ComponentMatrix& estimate,
                const std::optional<otd::Vector>& estimate_weights) {
  const otd::MatchReport report = otd::match_components(truth.components, estimate);
  Json j = otd::io::to_json(report);
  if (truth.weights && estimate_weights)
    j["max_weight_error"] = otd::matched_weight_error(*truth.weights, *estimate_weights, report.permutation);
  return j;
}

fs::path manifest_path(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

Json manifest(const std::string& command, std::uint64_t seed, Json parameters, const std::vector<fs::path>& inputs,
              const std::vector<fs::path>& outputs) {
  Json in = Json::array();
  for (const auto& p : inputs) in.push_back(p.filename().string());
  Json out = Json::array();
  for (const auto& p : outputs) out.push_back(p.filename().string());
  return Json{{"tool", "otd"},
              {"version", std::string(otd::io::version())},
              {"command", command},
              {"seed", seed},
              {"parameters", std::move(parameters)},
              {"inputs", in},
              {"outputs", out}};
}

Json failure_json(const otd::Error& e) {
  Json j{{"status", "failed"}, {"error", std::string(otd::to_string(e.code()))}, {"message", e.what()}};
  if (const auto* ex = dynamic_cast<const otd::AttemptsExhausted*>(&e))
    j["diagnostics"] = otd::io::to_json(ex->diagnostics());
  return j;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::size_t d = 0;
  std::optional<std::size_t> n;
  std::size_t k = 0;
  std::string style = "random_unit";
  std::uint64_t seed = 0;
  fs::path out;
  std::string noise = "none";
  std::size_t samples = 0;
  double eps_in = 0.0;
  otd::MixtureGenOptions gen;
};

int run_synth(const SynthArgs& a) {
  const auto structure = otd::component_structure_from_string(a.style);
  fs::create_directories(a.out);
  const fs::path comp_path = a.out / "components.json";
  const fs::path tensor_path = a.out / "tensor.json";
  std::vector<fs::path> outputs{comp_path, tensor_path};

  Json params{{"d", a.d}, {"style", a.style}, {"k", a.k}, {"eps_in", a.eps_in}};
  otd::SymTensor3 tensor = otd::SymTensor3::zeros(1);

  if (structure == otd::ComponentStructure::deconvolution_style) {
    const std::size_t n = a.n.value_or(a.d);
    otd::require(n == a.d, otd::ErrorCode::invalid_argument, "deconvolution style requires n = d");
    const auto mix = otd::gen_deconvolution_mixture(a.d, a.seed, a.gen);
    const auto noise = otd::NoiseSpec::parse(a.noise, a.d);
    params["n"] = n;
    params["noise"] = noise.describe();
    params["samples"] = a.samples;
    params["rho_min"] = a.gen.rho_min;
    params["rho_max"] = a.gen.rho_max;
    params["w_min"] = a.gen.w_min;
    params["tau"] = a.gen.tau;

    otd::io::write_json(comp_path, otd::io::to_json(mix.means()));
    tensor = mix.third_moment_tensor();
    const fs::path params_path = a.out / "params.json";
    Json pj = otd::io::params_to_json(mix, nullptr);
    pj["noise_covariance"] = otd::io::to_json(noise.noise_covariance(a.d));
    otd::io::write_json(params_path, pj);
    outputs.push_back(params_path);
    if (a.samples > 0) {
      const fs::path samples_path = a.out / "samples.csv";
      otd::io::write_samples_csv(samples_path,
                                 otd::sample_mixture(mix, noise, a.samples, otd::derive_seed(a.seed, 2)));
      outputs.push_back(samples_path);
    }
  } else {
    otd::require(a.n.has_value(), otd::ErrorCode::invalid_argument, "--n is required for this style");
    otd::require(a.samples == 0, otd::ErrorCode::invalid_argument, "--samples requires --style deconvolution");
    params["n"] = *a.n;
    const auto comps = otd::gen_components(a.d, *a.n, structure, a.seed, a.gen);
    otd::io::write_json(comp_path, otd::io::to_json(comps));
    tensor = otd::from_components(comps);
  }
  if (a.eps_in > 0.0) tensor = otd::perturb_tensor(tensor, a.eps_in, otd::derive_seed(a.seed, 1));
  otd::io::write_json(tensor_path, otd::io::to_json(tensor));
  otd::io::write_json(a.out / "manifest.json", manifest("synth", a.seed, params, {}, outputs));
  std::cout << "wrote " << outputs.size() << " files to " << a.out.string() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- decompose

struct DecomposeArgs {
  fs::path tensor;
  fs::path out;
  std::optional<fs::path> truth;
  otd::DecompositionConfig cfg;
  std::string probe = "refined";
};

int run_decompose(DecomposeArgs a) {
  a.cfg.probe_strategy = otd::probe_strategy_from_string(a.probe);
  const otd::SymTensor3 t = otd::io::tensor_from_json(otd::io::read_json(a.tensor));
  std::optional<ComponentsFile> truth;
  if (a.truth) truth = load_components(*a.truth);

  const auto& c = a.cfg;
  Json params{{"n", c.rank_n},
              {"k", c.overcompleteness_k},
              {"epsilon", c.epsilon},
              {"M", c.norm_bound_M},
              {"max_attempts", c.max_attempts},
              {"probe", otd::to_string(c.probe_strategy)},
              {"refine_period", c.refine_period}};
  std::vector<fs::path> inputs{a.tensor};
  if (a.truth) inputs.push_back(*a.truth);
  otd::io::write_json(manifest_path(a.out), manifest("decompose", c.seed, params, inputs, {a.out}));

  try {
    const otd::DecompositionResult r = otd::decompose(t, c);
    Json j{{"status", "ok"}, {"result", otd::io::to_json(r)}};
    if (truth) j["match"] = match_json(*truth, r.components, std::nullopt);
    otd::io::write_json(a.out, j);
    std::cout << "residual " << otd::io::format_double(r.residual_frobenius) << " after " << r.attempts_used
              << " attempts\n";
    return kExitOk;
  } catch (const otd::Error& e) {
    if (is_input_error(e.code())) throw;
    otd::io::write_json(a.out, failure_json(e));
    std::cerr << "decompose: " << e.what() << "\n";
    return kExitAlgorithm;
  }
}

// ------------------------------------------------- deconvolve / gmm

struct MixtureArgs {
  fs::path samples;
  fs::path out;
  std::optional<fs::path> truth;
  std::string epsilon;
  double noise_floor_factor = 1.0;
  bool emit_centered = false;
  otd::DeconvolutionConfig cfg;
  std::string probe = "refined";
};

otd::DeconvolutionConfig resolve(MixtureArgs& a, std::size_t dim) {
  otd::DeconvolutionConfig cfg = a.cfg;
  cfg.probe_strategy = otd::probe_strategy_from_string(a.probe);
  if (a.epsilon == "auto") {
    cfg.noise_floor_factor = a.noise_floor_factor;
  } else if (!a.epsilon.empty()) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(a.epsilon, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    otd::require(used == a.epsilon.size(), otd::ErrorCode::invalid_argument,
                 "--epsilon must be a number or 'auto'");
    cfg.epsilon = v;
  }
  cfg.validate(dim);
  return cfg;
}

int run_mixture(MixtureArgs a, bool gmm) {
  const char* command = gmm ? "gmm" : "deconvolve";
  const otd::SampleSet samples = otd::io::read_samples(a.samples);
  const otd::DeconvolutionConfig cfg = resolve(a, samples.dim());
  std::optional<ComponentsFile> truth;
  if (a.truth) truth = load_components(*a.truth);

  Json params{{"epsilon", a.epsilon.empty() ? Json("default") : Json(a.epsilon)},
              {"rho_max", cfg.rho_max},
              {"w_min", cfg.w_min},
              {"tau", cfg.tau},
              {"max_attempts", cfg.max_attempts},
              {"probe", otd::to_string(cfg.probe_strategy)},
              {"refine_period", cfg.refine_period},
              {"emit_centered", a.emit_centered}};
  if (cfg.noise_floor_factor) params["noise_floor_factor"] = *cfg.noise_floor_factor;
  std::vector<fs::path> inputs{a.samples};
  if (a.truth) inputs.push_back(*a.truth);
  otd::io::write_json(manifest_path(a.out), manifest(command, cfg.seed, params, inputs, {a.out}));

  try {
    Json j;
    const otd::DiscreteMixtureParams* mix = nullptr;
    otd::GmmResult g;
    otd::DeconvolutionResult r;
    if (gmm) {
      g = otd::estimate_gmm(samples, cfg);
      mix = &g.params.mixture;
      j = otd::io::params_to_json(*mix, &g.params.covariance);
      Json diag = otd::io::to_json(g.diagnostics.deconvolution, a.emit_centered);
      diag["covariance_min_eigenvalue"] = g.diagnostics.covariance_min_eigenvalue;
      diag["covariance_psd"] = otd::io::to_json(g.covariance_psd);
      j["diagnostics"] = diag;
    } else {
      r = otd::blind_deconvolve(samples, cfg);
      mix = &r.params;
      j = otd::io::params_to_json(*mix, nullptr);
      j["diagnostics"] = otd::io::to_json(r.diagnostics, a.emit_centered);
    }
    if (truth) j["match"] = match_json(*truth, mix->means(), mix->weights());
    otd::io::write_json(a.out, j);
    std::cout << command << ": recovered " << mix->count() << " components\n";
    return kExitOk;
  } catch (const otd::Error& e) {
    if (is_input_error(e.code())) throw;
    otd::io::write_json(a.out, failure_json(e));
    std::cerr << command << ": " << e.what() << "\n";
    return kExitAlgorithm;
  }
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  fs::path truth;
  fs::path estimate;
  std::optional<double> tau;
  std::string format = "json";
};

int run_eval(const EvalArgs& a) {
  const ComponentsFile truth = load_components(a.truth);
  const ComponentsFile est = load_components(a.estimate);
  otd::require(truth.components.dim() == est.components.dim() && truth.components.count() == est.components.count(),
               otd::ErrorCode::dimension_mismatch, "truth and estimate shapes differ");
  Json j = match_json(truth, est.components, est.weights);
  if (a.tau) {
    j["tau"] = *a.tau;
    j["robust_kruskal_rank_truth"] = otd::robust_kruskal_rank(truth.components, *a.tau);
    j["robust_kruskal_rank_estimate"] = otd::robust_kruskal_rank(est.components, *a.tau);
  }
  if (a.format == "json") {
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  std::ostringstream os;
  os << std::left << std::setw(10) << "estimate" << std::setw(8) << "truth" << "error\n";
  const auto& perm = j["permutation"];
  const auto& err = j["per_component_error"];
  for (std::size_t i = 0; i < perm.size(); ++i)
    os << std::setw(10) << i << std::setw(8) << perm[i].get<std::size_t>()
       << otd::io::format_double(err[i].get<double>()) << "\n";
  os << "max_error  " << otd::io::format_double(j["max_error"].get<double>()) << "\n";
  os << "mean_error " << otd::io::format_double(j["mean_error"].get<double>()) << "\n";
  if (j.contains("max_weight_error"))
    os << "max_weight_error " << otd::io::format_double(j["max_weight_error"].get<double>()) << "\n";
  if (a.tau)
    os << "robust_kruskal_rank(tau=" << otd::io::format_double(*a.tau)
       << ") truth " << j["robust_kruskal_rank_truth"].get<std::size_t>() << " estimate "
       << j["robust_kruskal_rank_estimate"].get<std::size_t>() << "\n";
  std::cout << os.str();
  return kExitOk;
}

void add_mixture_options(CLI::App* cmd, MixtureArgs& a) {
  cmd->add_option("--samples", a.samples, "Samples (CSV, or .json)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Output params JSON")->required();
  cmd->add_option("--seed", a.cfg.seed, "RNG seed")->required();
  cmd->add_option("--truth", a.truth, "Ground-truth components or params JSON");
  cmd->add_option("--epsilon", a.epsilon, "Inner decomposition tolerance, or 'auto' (noise-floor based)");
  cmd->add_option("--noise-floor-factor", a.noise_floor_factor, "Multiplier on the k3 standard error for 'auto'")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rho-max", a.cfg.rho_max, "Norm bound on recovered means")->capture_default_str();
  cmd->add_option("--w-min", a.cfg.w_min, "Weight floor reported in diagnostics")->capture_default_str();
  cmd->add_option("--tau", a.cfg.tau, "Robust Kruskal rank parameter")->capture_default_str();
  cmd->add_option("--max-attempts", a.cfg.max_attempts)->capture_default_str();
  cmd->add_option("--probe", a.probe, "uniform | refined")->capture_default_str();
  cmd->add_option("--refine-period", a.cfg.refine_period)->capture_default_str();
  cmd->add_option("--threads", a.cfg.threads, "Worker threads (default $OTD_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--emit-centered", a.emit_centered, "Include centered-frame means in diagnostics");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overcomplete tensor decomposition and mixture estimation"};
  app.set_version_flag("--version", std::string(otd::io::version()));
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate synthetic components, tensors and samples");
  synth->add_option("--d", sa.d, "Dimension")->required()->check(CLI::PositiveNumber);
  synth->add_option("--n", sa.n, "Number of components");
  synth->add_option("--k", sa.k, "Overcompleteness recorded for decompose")->capture_default_str();
  synth->add_option("--style", sa.style, "random_unit | negative_sum | deconvolution")->capture_default_str();
  synth->add_option("--seed", sa.seed, "RNG seed")->required();
  synth->add_option("--out", sa.out, "Output directory")->required();
  synth->add_option("--noise", sa.noise, "none | gaussian:s | uniform:h | laplace:b")->capture_default_str();
  synth->add_option("--samples", sa.samples, "Number of samples (deconvolution style)");
  synth->add_option("--eps-in", sa.eps_in, "Frobenius norm of a random symmetric tensor perturbation")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--rho-min", sa.gen.rho_min)->capture_default_str();
  synth->add_option("--rho-max", sa.gen.rho_max)->capture_default_str();
  synth->add_option("--w-min", sa.gen.w_min)->capture_default_str();
  synth->add_option("--tau", sa.gen.tau, "Robust Kruskal rank required of generated means")->capture_default_str();

  DecomposeArgs da;
  da.cfg.threads = default_threads();
  auto* dec = app.add_subcommand("decompose", "Decompose a symmetric order-3 tensor");
  dec->add_option("--tensor", da.tensor, "Tensor JSON")->required()->check(CLI::ExistingFile);
  dec->add_option("--out", da.out, "Output result JSON")->required();
  dec->add_option("--seed", da.cfg.seed, "RNG seed")->required();
  dec->add_option("--n", da.cfg.rank_n, "Number of components n = r + k")->required();
  dec->add_option("--k", da.cfg.overcompleteness_k, "Overcompleteness")->capture_default_str();
  dec->add_option("--epsilon", da.cfg.epsilon, "Reconstruction tolerance")->capture_default_str();
  dec->add_option("--M", da.cfg.norm_bound_M, "Component norm bound")->capture_default_str();
  dec->add_option("--max-attempts", da.cfg.max_attempts)->capture_default_str();
  dec->add_option("--probe", da.probe, "uniform | refined")->capture_default_str();
  dec->add_option("--refine-period", da.cfg.refine_period)->capture_default_str();
  dec->add_option("--threads", da.cfg.threads, "Worker threads (default $OTD_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  dec->add_option("--truth", da.truth, "Ground-truth components JSON");

  MixtureArgs ma;
  ma.cfg.threads = default_threads();
  auto* deconv = app.add_subcommand("deconvolve", "Blind deconvolution of a discrete mixture");
  add_mixture_options(deconv, ma);
  auto* gmm = app.add_subcommand("gmm", "Shared-covariance Gaussian mixture estimation");
  add_mixture_options(gmm, ma);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Match estimated components against ground truth");
  eval->add_option("--truth", ea.truth, "Truth components or params JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--estimate", ea.estimate, "Estimated components or params JSON")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--tau", ea.tau, "Report robust Kruskal ranks at this tau")->check(CLI::PositiveNumber);
  eval->add_option("--format", ea.format, "json | table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*synth) return run_synth(sa);
    if (*dec) return run_decompose(da);
    if (*deconv) return run_mixture(ma, false);
    if (*gmm) return run_mixture(ma, true);
    return run_eval(ea);
  } catch (const otd::AttemptsExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAlgorithm;
  } catch (const otd::Error& e) {
    std::cerr << "error [" << otd::to_string(e.code()) << "]: " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInput : kExitAlgorithm;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
