#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dro/experiment.hpp"
#include "json.hpp"

using namespace dro;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_file(const TempDir& dir, const std::string& name,
                       const std::string& content) {
  const std::string p = dir.file(name);
  std::ofstream out(p);
  out << content;
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig tiny_config(const TempDir& dir, const std::string& sub) {
  RunConfig cfg;
  cfg.synth_dim = 3;
  cfg.synth_train_count = 60;
  cfg.synth_test_count = 120;
  cfg.kappas = {0.5};
  cfg.max_iters = 200;
  cfg.group_size = 20;
  cfg.repeats = 50;
  cfg.telemetry_interval = 50;
  cfg.half_width = 5.0;
  cfg.out_dir = dir.file(sub);
  return cfg;
}

}  // namespace

TEST_CASE("ini parsing with sections, comments and overrides") {
  const TempDir dir("dro_exp_ini");
  const std::string path = write_file(dir, "run.ini",
                                      "# comment\n"
                                      "[model]\n"
                                      "type = logistic\n"
                                      "add_bias = false\n"
                                      "\n"
                                      "[solver]\n"
                                      "kappa = 0.1, 0.9\n"
                                      "max_iters = 500\n"
                                      "; another comment\n"
                                      "[run]\n"
                                      "seed = 12\n"
                                      "out = somewhere\n");
  const auto cfg = load_run_config(path);
  CHECK(cfg.model_type == "logistic");
  CHECK_FALSE(cfg.add_bias);
  CHECK(cfg.kappas == std::vector<double>{0.1, 0.9});
  CHECK(cfg.max_iters == 500);
  CHECK(cfg.seed == 12);
  CHECK(cfg.out_dir == "somewhere");

  const auto ov = load_run_config(path, {"solver.max_iters=99", "run.seed=13"});
  CHECK(ov.max_iters == 99);
  CHECK(ov.seed == 13);

  CHECK_THROWS_AS(load_run_config(path, {"solver.bogus=1"}), ConfigError);
  CHECK_THROWS_AS(load_run_config(path, {"no_equals_sign"}), ConfigError);
  CHECK_THROWS_AS(load_run_config(dir.file("missing.ini")), ConfigError);
}

TEST_CASE("bad config lines carry the file position") {
  const TempDir dir("dro_exp_badini");
  const std::string orphan = write_file(dir, "a.ini", "type = logistic\n");
  CHECK_THROWS_WITH_AS(load_run_config(orphan), doctest::Contains("a.ini:1"),
                       ConfigError);
  const std::string unknown =
      write_file(dir, "b.ini", "[model]\ntype = logistic\nwhat = 1\n");
  CHECK_THROWS_WITH_AS(load_run_config(unknown), doctest::Contains("b.ini:3"),
                       ConfigError);
  const std::string badval = write_file(dir, "c.ini", "[solver]\nmax_iters = soon\n");
  CHECK_THROWS_AS(load_run_config(badval), ConfigError);
  const std::string badsec = write_file(dir, "d.ini", "[solver\nmax_iters = 3\n");
  CHECK_THROWS_AS(load_run_config(badsec), ConfigError);
}

TEST_CASE("config validation rejects out-of-domain values") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  auto expect_reject = [](void (*mutate)(RunConfig&)) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  expect_reject([](RunConfig& c) { c.model_type = "svm"; });
  expect_reject([](RunConfig& c) { c.model_type = "mlp"; });  // needs layers
  expect_reject([](RunConfig& c) { c.kappas = {1.5}; });
  expect_reject([](RunConfig& c) { c.kappas = {-0.1}; });
  expect_reject([](RunConfig& c) { c.kappas = {0.5, 0.5}; });  // duplicates
  expect_reject([](RunConfig& c) { c.kappas.clear(); });
  expect_reject([](RunConfig& c) { c.a = 0.0; });
  expect_reject([](RunConfig& c) { c.c = -1.0; });
  expect_reject([](RunConfig& c) { c.batch = 0; });
  expect_reject([](RunConfig& c) { c.max_iters = 0; });
  expect_reject([](RunConfig& c) { c.exponent = 0.5; });
  expect_reject([](RunConfig& c) { c.exponent = 1.2; });
  expect_reject([](RunConfig& c) { c.tau0 = 0.0; });
  expect_reject([](RunConfig& c) { c.schedule_type = "geometric"; });
  expect_reject([](RunConfig& c) { c.set_type = "polytope"; });
  expect_reject([](RunConfig& c) { c.half_width = 0.0; });
  expect_reject([](RunConfig& c) { c.init = "warm"; });
  expect_reject([](RunConfig& c) { c.group_size = 0; });
  expect_reject([](RunConfig& c) { c.repeats = 0; });
  expect_reject([](RunConfig& c) { c.telemetry_interval = 0; });
  expect_reject([](RunConfig& c) { c.normalize = "whiten"; });
  expect_reject([](RunConfig& c) { c.synthetic_kind = "moons"; });
  expect_reject([](RunConfig& c) { c.contamination_enabled = true;
                                   c.contamination_fraction = 2.0; });
}

TEST_CASE("experiment produces the full artifact set and summaries") {
  const TempDir dir("dro_exp_run");
  RunConfig cfg = tiny_config(dir, "out");
  cfg.kappas = {0.0, 0.5};

  const auto res = run_experiment(cfg);
  CHECK(res.out_dir == cfg.out_dir);

  // Two STS methods plus the SGD baseline.
  REQUIRE(res.summaries.size() == 3);
  CHECK(res.summaries[0].method == "sts kappa=0");
  CHECK(res.summaries[1].method == "sts kappa=0.5");
  CHECK(res.summaries[2].method == "sgd");
  for (const auto& s : res.summaries) {
    CHECK(std::isfinite(s.final_robust_obj));
    CHECK(s.mean_test_loss > 0.0);
    CHECK(s.p90_test_loss >= s.mean_test_loss - 1.0);
  }

  for (const std::string required :
       {"manifest.json", "summary.csv", "telemetry_sts_kappa_0.csv",
        "telemetry_sts_kappa_0.5.csv", "telemetry_sgd.csv", "cdf_sts_kappa_0.csv",
        "cdf_sts_kappa_0.5.csv", "cdf_sgd.csv", "solution_sts_kappa_0.5.txt",
        "solution_sgd.txt"}) {
    CAPTURE(required);
    CHECK(fs::exists(fs::path(cfg.out_dir) / required));
  }
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "FAILED"));

  const std::string manifest = slurp(cfg.out_dir + "/manifest.json");
  CHECK(manifest.find("dro-run-manifest") != std::string::npos);
  CHECK(manifest.find("kernel_backend") != std::string::npos);

  const std::string summary = slurp(cfg.out_dir + "/summary.csv");
  CHECK(summary.rfind("method,", 0) == 0);
}

TEST_CASE("manifest rerun reproduces every artifact byte for byte") {
  const TempDir dir("dro_exp_rerun");
  RunConfig cfg = tiny_config(dir, "first");
  cfg.contamination_enabled = true;
  cfg.contamination_label = 1.0;
  cfg.contamination_fraction = 0.5;

  const auto first = run_experiment(cfg);

  auto rerun_cfg = load_run_config(cfg.out_dir + "/manifest.json",
                                   {"run.out=" + dir.file("second")});
  const auto second = run_experiment(rerun_cfg);

  REQUIRE(first.artifacts == second.artifacts);
  for (const auto& name : first.artifacts) {
    if (name == "manifest.json") continue;  // may differ in out path only
    CAPTURE(name);
    CHECK(slurp(cfg.out_dir + "/" + name) == slurp(rerun_cfg.out_dir + "/" + name));
  }
}

TEST_CASE("contamination touches only the training split") {
  const TempDir dir("dro_exp_contam");

  RunConfig clean = tiny_config(dir, "clean");
  clean.max_iters = 40;
  clean.telemetry_interval = 40;
  RunConfig dirty = clean;
  dirty.out_dir = dir.file("dirty");
  dirty.contamination_enabled = true;
  dirty.contamination_label = 1.0;
  dirty.contamination_fraction = 0.8;

  run_experiment(clean);
  run_experiment(dirty);

  // Same seeds, same synthetic data: only the train split changed, so the
  // solutions differ while the test set (and hence the CDF grid protocol)
  // stays identical in configuration.
  const auto clean_sol = read_solution(dir.file("clean") + "/solution_sts_kappa_0.5.txt");
  const auto dirty_sol = read_solution(dir.file("dirty") + "/solution_sts_kappa_0.5.txt");
  REQUIRE(clean_sol.x.size() == dirty_sol.x.size());
  CHECK(clean_sol.x != dirty_sol.x);

  const auto manifest = nlohmann::json::parse(slurp(dir.file("dirty") + "/manifest.json"));
  auto has_contaminate = [](const nlohmann::json& transforms) {
    for (const auto& t : transforms)
      if (t.get<std::string>().rfind("contaminate(", 0) == 0) return true;
    return false;
  };
  CHECK(has_contaminate(manifest["provenance"]["train"]["transforms"]));
  CHECK_FALSE(has_contaminate(manifest["provenance"]["test"]["transforms"]));
}

TEST_CASE("a failing stage leaves a FAILED marker naming the stage") {
  const TempDir dir("dro_exp_fail");
  RunConfig cfg = tiny_config(dir, "out");
  cfg.train_path = dir.file("no_such_file.libsvm");
  cfg.test_path = dir.file("also_missing.libsvm");

  CHECK_THROWS(run_experiment(cfg));
  const fs::path marker = fs::path(cfg.out_dir) / "FAILED";
  REQUIRE(fs::exists(marker));
  CHECK(slurp(marker.string()).find("data") != std::string::npos);

  // A later successful run clears the marker.
  cfg.train_path.clear();
  cfg.test_path.clear();
  cfg.max_iters = 40;
  cfg.telemetry_interval = 40;
  run_experiment(cfg);
  CHECK_FALSE(fs::exists(marker));
}

TEST_CASE("solution files round-trip and validate") {
  const TempDir dir("dro_exp_sol");
  const std::string path = dir.file("sol.txt");
  const std::vector<double> x = {0.25, -1.0 / 3.0, 4e-17};
  write_solution(path, "logistic", x, true);

  const auto sol = read_solution(path);
  CHECK(sol.model_spec == "logistic");
  CHECK(sol.add_bias);
  CHECK(sol.x == x);  // exact through the 17-digit format

  const std::string text = slurp(path);
  CHECK(text.rfind("# dro-solution v1", 0) == 0);

  write_file(dir, "bad1.txt", "0.5\n0.25\n");
  CHECK_THROWS_AS(read_solution(dir.file("bad1.txt")), std::runtime_error);
  write_file(dir, "bad2.txt", "# dro-solution v1\n# model: logistic\n# dim: 2\n# add_bias: false\n0.5\n");
  CHECK_THROWS_AS(read_solution(dir.file("bad2.txt")), std::runtime_error);
  write_file(dir, "bad3.txt", "# dro-solution v1\n# model: logistic\n# dim: 1\n# add_bias: false\nzzz\n");
  CHECK_THROWS_AS(read_solution(dir.file("bad3.txt")), std::runtime_error);
}

TEST_CASE("models rebuild from solution specs") {
  const auto logistic = make_model_from_spec("logistic", 4);
  CHECK(logistic->dimension() == 4);
  const auto ls = make_model_from_spec("least_squares", 2);
  CHECK(ls->spec() == "least_squares");
  const auto mlp = make_model_from_spec("mlp 3,4,2", 16 + 10);
  CHECK(mlp->dimension() == 26);
  CHECK_THROWS(make_model_from_spec("mlp 3,4,2", 25));  // wrong parameter count
  CHECK_THROWS(make_model_from_spec("forest", 4));
  CHECK_THROWS(make_model_from_spec("mlp", 4));
}
