#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dro/cdf.hpp"
#include "dro/data.hpp"
#include "dro/experiment.hpp"
#include "dro/kernels.hpp"
#include "dro/version.hpp"

namespace {

dro::Dataset load_dataset(const std::string& path, const std::string& label_map) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  if (csv) return dro::load_csv(path);
  if (label_map.empty()) return dro::load_libsvm(path);
  const dro::LabelMap lm = dro::parse_label_pairs(label_map);
  return dro::load_libsvm(path, 0, &lm);
}

int do_run(const std::string& config_path, std::vector<std::string> overrides) {
  const dro::RunConfig config = dro::load_run_config(config_path, overrides);
  const dro::ExperimentResult result = dro::run_experiment(config);

  std::printf("%-24s %14s %14s %14s\n", "method", "robust_obj", "mean_test",
              "p90_test");
  for (const auto& s : result.summaries)
    std::printf("%-24s %14.6g %14.6g %14.6g\n", s.method.c_str(), s.final_robust_obj,
                s.mean_test_loss, s.p90_test_loss);
  std::printf("artifacts in %s (manifest.json rerunnable)\n", result.out_dir.c_str());
  return 0;
}

int do_eval_cdf(const std::string& solution_path, const std::string& data_path,
                const std::string& label_map, std::size_t group_size,
                std::size_t repeats, std::uint64_t seed, bool exhaustive,
                const std::string& out_csv) {
  const dro::SolutionFile sol = dro::read_solution(solution_path);
  dro::Dataset ds = load_dataset(data_path, label_map);
  if (sol.add_bias) ds = dro::add_bias(ds);
  const auto model = dro::make_model_from_spec(sol.model_spec, sol.x.size());

  if (exhaustive) group_size = ds.size();
  const dro::CdfArtifact cdf =
      dro::evaluate_cdf(*model, sol.x, ds, group_size, repeats, seed, !exhaustive);
  dro::write_cdf_csv(cdf, out_csv);
  std::printf("model %s on %zu samples: mean %.6g, p90 %.6g -> %s\n",
              sol.model_spec.c_str(), ds.size(), dro::cdf_mean(cdf),
              dro::cdf_quantile(cdf, 0.9), out_csv.c_str());
  return 0;
}

int do_compare(const std::string& path_a, const std::string& path_b) {
  const dro::CdfArtifact a = dro::read_cdf_csv(path_a);
  const dro::CdfArtifact b = dro::read_cdf_csv(path_b);
  const dro::DominanceReport rep = dro::compare_cdfs(a, b);

  std::printf("%-10s %14s\n", "quantile", "a - b");
  for (int d = 1; d <= 9; ++d)
    std::printf("%-10.1f %14.6g\n", d / 10.0, rep.decile_diff[d - 1]);
  std::printf("dominance fraction (a <= b): %.4g\n", rep.dominance_fraction);
  std::printf("ks statistic: %.6g\n", rep.ks_statistic);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust learning experiments: single time-scale solver vs SGD"};
  app.set_version_flag("--version", std::string("dro ") + dro::kVersion);
  app.require_subcommand(1);

  std::string kernels = "auto";
  app.add_option("--kernels", kernels, "kernel backend: auto, scalar or avx2")
      ->capture_default_str();

  auto* run_cmd =
      app.add_subcommand("run", "execute an experiment from a config file or manifest");
  std::string config_path;
  run_cmd->add_option("config", config_path, "key = value config or manifest.json")
      ->required();
  std::vector<std::string> overrides;
  run_cmd->add_option("--set", overrides, "override as section.key=value");
  std::string seed_flag, out_flag;
  run_cmd->add_option("--seed", seed_flag, "override run.seed");
  run_cmd->add_option("--out", out_flag, "override run.out");

  auto* eval_cmd =
      app.add_subcommand("eval-cdf", "test-loss CDF of a saved solution on a dataset");
  std::string solution_path, data_path, label_map, eval_out = "cdf.csv";
  std::size_t group_size = 100, repeats = 200;
  std::uint64_t eval_seed = 0;
  bool exhaustive = false;
  eval_cmd->add_option("--solution", solution_path, "solution file from a run")->required();
  eval_cmd->add_option("--data", data_path, "dataset (.csv or libsvm)")->required();
  eval_cmd->add_option("--label-map", label_map, "raw:mapped,... labels for libsvm data");
  eval_cmd->add_option("--group-size", group_size, "points per repeat")
      ->capture_default_str();
  eval_cmd->add_option("--repeats", repeats, "number of repeats")->capture_default_str();
  eval_cmd->add_option("--seed", eval_seed, "sampling seed")->capture_default_str();
  eval_cmd->add_flag("--exhaustive", exhaustive,
                     "one exact pass over the whole dataset instead of sampling");
  eval_cmd->add_option("--out", eval_out, "output CSV")->capture_default_str();

  auto* cmp_cmd = app.add_subcommand("compare", "compare two CDF CSV files");
  std::string cdf_a, cdf_b;
  cmp_cmd->add_option("a", cdf_a, "first CDF CSV")->required();
  cmp_cmd->add_option("b", cdf_b, "second CDF CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    dro::kern::set_backend(dro::kern::resolve_backend(kernels));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*run_cmd) {
      if (!seed_flag.empty()) overrides.push_back("run.seed=" + seed_flag);
      if (!out_flag.empty()) overrides.push_back("run.out=" + out_flag);
      return do_run(config_path, overrides);
    }
    if (*eval_cmd)
      return do_eval_cdf(solution_path, data_path, label_map, group_size, repeats,
                         eval_seed, exhaustive, eval_out);
    return do_compare(cdf_a, cdf_b);
  } catch (const dro::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
