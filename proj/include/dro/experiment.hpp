#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dro/loss.hpp"

namespace dro {

// Raised for anything wrong with a configuration (bad file, bad key, bad
// value, failed validation). The CLI maps it to exit code 2; every other
// failure is a runtime error (exit 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // [model]
  std::string model_type = "logistic";  // logistic | least_squares | mlp
  std::vector<std::size_t> mlp_layers;  // input,hidden...,classes
  bool add_bias = true;

  // [data] — file paths win over the synthetic generator when set.
  std::string train_path;
  std::string test_path;
  std::string synthetic_kind = "binary";  // binary | blobs
  std::size_t synth_dim = 5;
  std::size_t synth_train_count = 200;
  std::size_t synth_test_count = 1000;
  double synth_minority_fraction = 0.25;
  double synth_separation = 2.0;
  double synth_noise = 1.0;
  std::size_t synth_classes = 3;
  std::string normalize = "none";  // none | unit_scale | standardize
  std::vector<std::pair<double, double>> label_map;

  // [contamination] — applied to the training split only.
  bool contamination_enabled = false;
  double contamination_label = 1.0;
  double contamination_fraction = 0.0;
  std::optional<std::uint64_t> contamination_seed;

  // [feasible]
  std::string set_type = "box";  // box | ball | simplex
  double half_width = 1000.0;
  double radius = 10.0;
  double simplex_scale = 1.0;

  // [solver]
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  std::vector<double> kappas{0.5};
  int batch = 1;
  std::size_t max_iters = 10000;
  std::string init = "zero";  // zero | random
  double init_scale = 0.1;
  bool sgd_baseline = true;

  // [schedule]
  std::string schedule_type = "polynomial";  // polynomial | constant_over_sqrt
  double tau0 = 1.0;
  double exponent = 0.75;

  // [eval]
  std::size_t group_size = 100;
  std::size_t repeats = 200;
  std::optional<std::uint64_t> eval_seed;

  // [run]
  std::uint64_t seed = 0;
  std::string out_dir = "runs/out";
  std::size_t telemetry_interval = 100;

  void validate() const;  // throws ConfigError
};

// Reads either a key = value config (sections in brackets) or a previously
// written run manifest (JSON); applies overrides of the form
// "section.key=value" afterwards. Manifest loading restores the recorded
// kernel backend so a rerun is bit-exact.
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

struct MethodSummary {
  std::string method;  // "sts kappa=0.5" or "sgd"
  double final_robust_obj = 0.0;
  double mean_test_loss = 0.0;
  double p90_test_loss = 0.0;
};

struct ExperimentResult {
  std::string out_dir;
  std::vector<MethodSummary> summaries;
  std::vector<std::string> artifacts;  // file names relative to out_dir
};

// Full pipeline: data, contamination of the train split, normalization
// fitted on train, one STS run per kappa plus an SGD baseline on identical
// data and seeds, CDF evaluation on the untouched test split, CSV artifacts
// and a rerunnable manifest.json. On a stage failure a FAILED marker with
// the stage tag is left in the output directory and the error propagates.
ExperimentResult run_experiment(const RunConfig& config);

struct SolutionFile {
  std::string model_spec;
  bool add_bias = false;
  std::vector<double> x;
};

void write_solution(const std::string& path, const std::string& model_spec,
                    std::span<const double> x, bool add_bias);
SolutionFile read_solution(const std::string& path);

// Rebuilds a loss model from a solution header spec ("logistic",
// "least_squares", "mlp 20,10,3"); dim is the solution vector length and
// must be consistent with the spec.
std::unique_ptr<LossModel> make_model_from_spec(const std::string& spec, std::size_t dim);

}  // namespace dro
