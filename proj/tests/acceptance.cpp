// Acceptance checks for the solver library, one criterion per function.
// Usage: acceptance [N] runs criterion N (1..10), no argument runs all.
// Each criterion prints exactly one [PASS]/[FAIL] line; the exit code is 0
// only if every selected criterion passed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dro/cdf.hpp"
#include "dro/data.hpp"
#include "dro/experiment.hpp"
#include "dro/feasible_set.hpp"
#include "dro/loss.hpp"
#include "dro/risk.hpp"
#include "dro/rng.hpp"
#include "dro/schedule.hpp"
#include "dro/sgd.hpp"
#include "dro/sts.hpp"
#include "dro/synthetic.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dro;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

class CountingSource final : public SampleSource {
 public:
  explicit CountingSource(SampleSource& inner) : inner_(&inner) {}
  const DataSample& next() override {
    ++count;
    return inner_->next();
  }
  std::size_t count = 0;

 private:
  SampleSource* inner_;
};

// ---------------------------------------------------------------- 1

// Risk values against the LP dual maximum on random finite distributions.
bool criterion_1() {
  Rng rng(101);
  const double kappas[] = {0.0, 0.3, 0.5, 1.0};
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t m = 1 + rng.uniform_index(50);
    std::vector<double> z(m), w(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = 5.0 * rng.normal();
      w[i] = -std::log(rng.uniform() + 1e-300);
      total += w[i];
    }
    for (auto& x : w) x /= total;

    const double kappa = kappas[t % 4];
    const EmpiricalDistribution dist(z, w);
    const double direct = evaluate_risk(dist, RiskParams(kappa));
    const double lp = oracle::risk_dual_lp(z, w, kappa);
    worst = std::max(worst, std::abs(direct - lp));
  }
  std::printf("  500 distributions, max |risk - LP dual| = %.3e (tol 1e-9)\n", worst);
  return worst <= 1e-9;
}

// ---------------------------------------------------------------- 2

// Projections against brute-force oracles plus the variational inequality
// and nonexpansiveness properties.
bool criterion_2() {
  Rng rng(202);
  double worst_oracle = 0.0;

  auto random_set = [&](std::size_t dim) {
    switch (rng.uniform_index(3)) {
      case 0: {
        std::vector<double> lo(dim), hi(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          lo[i] = 2.0 * rng.normal();
          hi[i] = lo[i] + 0.1 + std::abs(2.0 * rng.normal());
        }
        return FeasibleSet::box(std::move(lo), std::move(hi));
      }
      case 1: {
        std::vector<double> center(dim);
        for (auto& c : center) c = rng.normal();
        return FeasibleSet::l2_ball(std::move(center), 0.2 + std::abs(rng.normal()));
      }
      default:
        return FeasibleSet::simplex(dim, 0.5 + 2.0 * rng.uniform());
    }
  };

  for (int t = 0; t < 200; ++t) {
    const std::size_t dim = 1 + rng.uniform_index(8);
    std::vector<double> p(dim);
    for (auto& v : p) v = 4.0 * rng.normal();

    std::vector<double> got, want;
    switch (t % 3) {
      case 0: {
        std::vector<double> lo(dim), hi(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          lo[i] = 2.0 * rng.normal();
          hi[i] = lo[i] + 0.1 + std::abs(2.0 * rng.normal());
        }
        got = FeasibleSet::box(lo, hi).project(p);
        want = oracle::project_box_search(p, lo, hi);
        break;
      }
      case 1: {
        std::vector<double> center(dim);
        for (auto& c : center) c = rng.normal();
        const double radius = 0.2 + std::abs(rng.normal());
        got = FeasibleSet::l2_ball(center, radius).project(p);
        want = oracle::project_ball_kkt(p, center, radius);
        break;
      }
      default: {
        const double scale = 0.5 + 2.0 * rng.uniform();
        got = FeasibleSet::simplex(dim, scale).project(p);
        want = oracle::project_simplex_enumerate(p, scale);
        break;
      }
    }
    worst_oracle = std::max(worst_oracle, dist2(got, want));
  }

  // Properties on 1000 fresh instances.
  double worst_vi = -1e300;
  double worst_expansion = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t dim = 1 + rng.uniform_index(8);
    const FeasibleSet set = random_set(dim);

    std::vector<double> pa(dim), pb(dim);
    for (auto& v : pa) v = 4.0 * rng.normal();
    for (auto& v : pb) v = 4.0 * rng.normal();
    const auto qa = set.project(pa);
    const auto qb = set.project(pb);

    // <p - Px, y - Px> <= 0 for every feasible y.
    for (int j = 0; j < 5; ++j) {
      std::vector<double> y(dim);
      for (auto& v : y) v = 4.0 * rng.normal();
      const auto yf = set.project(y);
      double inner = 0.0;
      for (std::size_t i = 0; i < dim; ++i)
        inner += (pa[i] - qa[i]) * (yf[i] - qa[i]);
      worst_vi = std::max(worst_vi, inner);
    }
    worst_expansion =
        std::max(worst_expansion, dist2(qa, qb) - dist2(pa, pb));
  }

  std::printf("  200 oracle instances, max deviation   = %.3e (tol 1e-9)\n",
              worst_oracle);
  std::printf("  1000 property instances, max VI value = %.3e (tol 1e-9)\n", worst_vi);
  std::printf("  max expansion excess                  = %.3e (tol 1e-12)\n",
              worst_expansion);
  return worst_oracle <= 1e-9 && worst_vi <= 1e-9 && worst_expansion <= 1e-12;
}

// ---------------------------------------------------------------- 3

// Selected subgradients against central finite differences.
bool criterion_3() {
  Rng rng(303);
  const LogisticLoss logistic(6);
  const LeastSquaresLoss least_squares(6);
  const MlpReluLoss mlp({6, 5, 3});

  double worst = 0.0;
  auto check = [&](const LossModel& model, double label) {
    for (int t = 0; t < 20; ++t) {
      std::vector<double> x(model.dimension());
      for (auto& v : x) v = rng.normal();
      std::vector<double> f(6);
      for (auto& v : f) v = rng.normal();
      const DataSample s{f, label == -2.0
                                ? (rng.uniform() < 0.5 ? -1.0 : 1.0)
                                : label == -3.0
                                      ? 2.0 * rng.normal()
                                      : static_cast<double>(rng.uniform_index(3))};
      std::vector<double> g(model.dimension());
      model.subgradient(x, s, g);
      const auto fd = oracle::fd_gradient(model, x, s, 1e-6);
      std::vector<double> diff(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) diff[i] = g[i] - fd[i];
      worst = std::max(worst, norm2(diff) / std::max(1.0, norm2(fd)));
    }
  };
  check(logistic, -2.0);
  check(least_squares, -3.0);
  check(mlp, -4.0);

  std::printf("  60 points across 3 models, max relative error = %.3e (tol 1e-5)\n",
              worst);
  return worst < 1e-5;
}

// ---------------------------------------------------------------- 4

// Monte Carlo mean of the composite estimator against full enumeration.
bool criterion_4() {
  const auto data = make_binary_problem({.dim = 4, .count = 100, .seed = 404});
  const LogisticLoss model(4);
  const double kappa = 0.5;
  Rng rng(405);

  // Five fixed (x, u) points: u below every loss, above every loss, and at
  // three tie-free interior levels.
  bool ok = true;
  double worst_sigmas = 0.0;
  for (int point = 0; point < 5; ++point) {
    std::vector<double> x(4);
    for (auto& v : x) v = 0.5 * rng.normal();

    std::vector<double> losses;
    for (const auto& s : data.samples()) losses.push_back(model.value(x, s));
    std::sort(losses.begin(), losses.end());
    double u = 0.0;
    switch (point) {
      case 0: u = losses.front() - 1.0; break;
      case 1: u = losses.back() + 1.0; break;
      case 2: u = 0.5 * (losses[24] + losses[25]); break;
      case 3: u = 0.5 * (losses[49] + losses[50]); break;
      default: u = 0.5 * (losses[89] + losses[90]); break;
    }

    const auto exact = oracle::exact_composite_subgradient(model, data, x, u, kappa);

    UniformSampler sampler(data, 500 + static_cast<std::uint64_t>(point));
    const int draws = 100000;
    std::vector<double> sum(4, 0.0), sumsq(4, 0.0);
    for (int d = 0; d < draws; ++d) {
      const auto est = make_estimates(model, x, u, RiskParams(kappa), sampler, 1);
      for (int j = 0; j < 4; ++j) {
        sum[j] += est.composite[j];
        sumsq[j] += est.composite[j] * est.composite[j];
      }
    }
    for (int j = 0; j < 4; ++j) {
      const double mean = sum[j] / draws;
      const double var = std::max(0.0, sumsq[j] / draws - mean * mean);
      const double se = std::sqrt(var / draws);
      const double sigmas = std::abs(mean - exact[j]) / (se + 1e-15);
      worst_sigmas = std::max(worst_sigmas, sigmas);
      if (std::abs(mean - exact[j]) > 4.0 * se + 1e-12) ok = false;
    }
  }
  std::printf("  5 points x 1e5 draws, worst deviation = %.2f standard errors (tol 4)\n",
              worst_sigmas);
  return ok;
}

// ---------------------------------------------------------------- 5

// Stochastic runs against a deterministic full-batch oracle optimum on a
// convex instance.
bool criterion_5() {
  const auto data = make_binary_problem({.dim = 5, .count = 200, .seed = 505});
  const LogisticLoss model(5);
  const FeasibleSet set = FeasibleSet::centered_box(5, 1000.0);
  const auto schedule = StepSchedule::polynomial(1.0, 0.75);
  const double kappa = 0.5;

  const auto opt = oracle::solve_robust_multistart(model, data, set, kappa, 4, 5050);
  std::printf("  oracle optimum %.9f (stationarity %.2e)\n", opt.objective,
              opt.stationarity);

  int good = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SolverParams params;
    params.kappa = kappa;
    params.max_iters = 50000;
    params.seed = seed;
    const auto res = run(params, schedule, set, model, data, 1000);
    const auto& last = res.records.back();
    const double obj_gap = last.robust_obj - opt.objective;
    const bool pass = std::abs(obj_gap) <= 1e-3 && std::abs(last.eta) < 1e-3 &&
                      std::abs(last.u_minus_h) < 1e-2;
    good += pass;
    std::printf("  seed %llu: F-F* = %+.2e, |eta| = %.2e, |u-h| = %.2e %s\n",
                static_cast<unsigned long long>(seed), obj_gap, std::abs(last.eta),
                std::abs(last.u_minus_h), pass ? "ok" : "MISS");
  }
  std::printf("  %d of 5 seeds within tolerance (need >= 4)\n", good);
  return good >= 4;
}

// ---------------------------------------------------------------- 6

// With the risk term switched off the method solves the same problem as
// plain projected SGD.
bool criterion_6() {
  const auto data = make_binary_problem({.dim = 5, .count = 200, .seed = 505});
  const LogisticLoss model(5);
  const FeasibleSet set = FeasibleSet::centered_box(5, 1000.0);
  const auto schedule = StepSchedule::polynomial(1.0, 0.75);

  std::vector<double> gaps;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SolverParams sp;
    sp.kappa = 0.0;
    sp.max_iters = 50000;
    sp.seed = seed;
    const auto sts = run(sp, schedule, set, model, data, sp.max_iters);

    SgdParams gp;
    gp.max_iters = 50000;
    gp.seed = seed;
    const auto sgd = run_sgd(gp, schedule, set, model, data, gp.max_iters);

    // With kappa = 0 the exact robust objective reduces to the mean loss,
    // so both records report the same functional.
    const double gap =
        std::abs(sts.records.back().robust_obj - sgd.records.back().robust_obj);
    gaps.push_back(gap);
    std::printf("  seed %llu: |mean loss gap| = %.2e\n",
                static_cast<unsigned long long>(seed), gap);
  }
  const double med = median(gaps);
  std::printf("  median gap = %.2e (tol 2e-3)\n", med);
  return med <= 2e-3;
}

// ---------------------------------------------------------------- 7

// Sampling cost contract: at most two subgradient evaluations per draw,
// exactly one whenever the estimate falls in the l < u branch.
bool criterion_7() {
  const auto data = make_binary_problem({.dim = 4, .count = 120, .seed = 707});
  const LogisticLoss model(4);
  Rng rng(708);

  bool ok = true;
  std::size_t singles = 0, doubles = 0;

  // Direct estimator contract over random states.
  UniformSampler base(data, 7070);
  CountingSource counted(base);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(4);
    for (auto& v : x) v = rng.normal();
    const double u = 0.2 + 0.8 * rng.uniform();

    const std::size_t before = counted.count;
    const auto est = make_estimates(model, x, u, RiskParams(0.5), counted, 1);
    const std::size_t used = counted.count - before;
    if (used != static_cast<std::size_t>(est.samples_used)) ok = false;

    if (est.g_u == 0.0) {
      // Below-u branch: one draw, and j_tilde is the very same selection.
      if (used != 1) ok = false;
      if (est.j_tilde != est.g_x) ok = false;
      ++singles;
    } else {
      if (used != 2) ok = false;
      ++doubles;
    }
  }

  // Solver-level accounting at two batch sizes.
  for (int batch : {1, 3}) {
    SolverParams params;
    params.kappa = 0.5;
    params.batch = batch;
    params.seed = 7;
    const FeasibleSet set = FeasibleSet::centered_box(4, 50.0);
    const auto schedule = StepSchedule::polynomial(1.0, 0.75);
    UniformSampler sampler(data, params.seed);
    auto state = init_state(params, set, model, sampler);
    std::int64_t prev = state.total_samples;
    for (int k = 0; k < 2000; ++k) {
      iterate(state, params, schedule, set, model, sampler);
      const auto delta = state.total_samples - prev;
      prev = state.total_samples;
      if (delta < batch || delta > 2 * batch) ok = false;
    }
    if (state.total_samples > 2 * batch * (2000 + 1)) ok = false;
  }

  std::printf("  500 estimator calls: %zu single-draw, %zu double-draw, all within "
              "contract: %s\n",
              singles, doubles, ok ? "yes" : "NO");
  return ok && singles > 0 && doubles > 0;
}

// ---------------------------------------------------------------- 8

// Risk-averse training beats plain SGD in the upper tail after most of the
// minority class is deleted from the training split.
bool criterion_8() {
  const LogisticLoss model(5);
  const FeasibleSet set = FeasibleSet::centered_box(5, 1000.0);
  const auto schedule = StepSchedule::polynomial(1.0, 0.75);

  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto train_full = make_binary_problem(
        {.dim = 5, .count = 600, .seed = 800 + seed, .minority_fraction = 0.25});
    const auto test = make_binary_problem(
        {.dim = 5, .count = 2000, .seed = 880 + seed, .minority_fraction = 0.25});

    ContaminationSpec spec;
    spec.target_label = 1.0;
    spec.deletion_fraction = 0.8;
    spec.seed = 8800 + seed;
    const auto train = contaminate(train_full, spec);

    SolverParams sp;
    sp.kappa = 0.5;
    sp.max_iters = 20000;
    sp.seed = seed;
    const auto sts = run(sp, schedule, set, model, train, sp.max_iters);

    SgdParams gp;
    gp.max_iters = 20000;
    gp.seed = seed;
    const auto sgd = run_sgd(gp, schedule, set, model, train, gp.max_iters);

    const std::uint64_t eval_seed = 88000 + seed;
    const auto cdf_sts = evaluate_cdf(model, sts.state.x, test, 100, 200, eval_seed);
    const auto cdf_sgd = evaluate_cdf(model, sgd.x, test, 100, 200, eval_seed);
    const double p90_sts = cdf_quantile(cdf_sts, 0.9);
    const double p90_sgd = cdf_quantile(cdf_sgd, 0.9);
    wins += p90_sts < p90_sgd;
    std::printf("  seed %llu: p90 sts = %.4f, p90 sgd = %.4f %s\n",
                static_cast<unsigned long long>(seed), p90_sts, p90_sgd,
                p90_sts < p90_sgd ? "win" : "loss");
  }
  std::printf("  %d of 5 seeds favor the risk-averse run (need >= 4)\n", wins);
  return wins >= 4;
}

// ---------------------------------------------------------------- 9

// A run re-executed from its manifest reproduces all artifacts bit-exactly.
bool criterion_9() {
  const fs::path root = fs::temp_directory_path() / "dro_acceptance_9";
  fs::remove_all(root);

  RunConfig cfg;
  cfg.synth_dim = 4;
  cfg.synth_train_count = 80;
  cfg.synth_test_count = 160;
  cfg.kappas = {0.0, 0.5};
  cfg.max_iters = 400;
  cfg.telemetry_interval = 100;
  cfg.group_size = 20;
  cfg.repeats = 50;
  cfg.half_width = 50.0;
  cfg.contamination_enabled = true;
  cfg.contamination_label = 1.0;
  cfg.contamination_fraction = 0.5;
  cfg.init = "random";
  cfg.out_dir = (root / "first").string();

  const auto first = run_experiment(cfg);
  const auto rerun_cfg = load_run_config(cfg.out_dir + "/manifest.json",
                                         {"run.out=" + (root / "second").string()});
  const auto second = run_experiment(rerun_cfg);

  bool ok = first.artifacts == second.artifacts;
  std::size_t compared = 0;
  for (const auto& name : first.artifacts) {
    if (name == "manifest.json") continue;  // differs in the out path
    std::ifstream a(fs::path(first.out_dir) / name, std::ios::binary);
    std::ifstream b(fs::path(second.out_dir) / name, std::ios::binary);
    std::ostringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    if (!a || !b || sa.str().empty() || sa.str() != sb.str()) {
      std::printf("  MISMATCH in %s\n", name.c_str());
      ok = false;
    }
    ++compared;
  }
  std::printf("  %zu artifacts compared byte for byte: %s\n", compared,
              ok ? "identical" : "NOT identical");
  fs::remove_all(root);
  return ok && compared >= 8;
}

// ---------------------------------------------------------------- 10

// Non-convex smoke: a small ReLU network under class-deletion contamination
// keeps finite state, a shrinking gap and a tracking inner value.
bool criterion_10() {
  BlobsSpec blobs;
  blobs.dim = 20;
  blobs.count = 600;
  blobs.seed = 10;
  const auto train_full = make_blobs_problem(blobs);
  ContaminationSpec spec;
  spec.target_label = 0.0;
  spec.deletion_fraction = 0.8;
  spec.seed = 1010;
  const auto train = contaminate(train_full, spec);

  const MlpReluLoss model({20, 10, 3});
  const FeasibleSet set = FeasibleSet::centered_box(model.dimension(), 1000.0);
  const auto schedule = StepSchedule::polynomial(1.0, 0.75);

  SolverParams params;
  params.kappa = 0.5;
  params.max_iters = 10000;
  params.seed = 3;

  // Zero weights are a ReLU dead point (the kink derivative is 0), so the
  // smoke test starts from a small random vector like the experiment driver.
  Rng init_rng(derive_seed(params.seed, 3));
  std::vector<double> x0(model.dimension());
  for (auto& v : x0) v = 0.1 * init_rng.normal();

  const auto res = run(params, schedule, set, model, train, 10, x0);

  bool finite = std::isfinite(res.state.u);
  for (double v : res.state.x) finite = finite && std::isfinite(v);

  const auto& recs = res.records;
  const std::size_t n = recs.size();
  std::vector<double> first_decile, last_decile;
  for (std::size_t i = 0; i < n / 10; ++i)
    first_decile.push_back(std::abs(recs[i].eta));
  for (std::size_t i = n - n / 10; i < n; ++i)
    last_decile.push_back(std::abs(recs[i].eta));
  const double eta_first = median(first_decile);
  const double eta_last = median(last_decile);
  const double u_gap = std::abs(recs.back().u_minus_h);

  std::printf("  final state finite: %s\n", finite ? "yes" : "NO");
  std::printf("  median |eta|: first decile %.3e -> final decile %.3e\n", eta_first,
              eta_last);
  std::printf("  final |u - h| = %.3e (tol 5e-2)\n", u_gap);
  return finite && eta_last < eta_first && u_gap < 0.05;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 10) {
      std::fprintf(stderr, "usage: %s [criterion 1..10]\n", argv[0]);
      return 2;
    }
  }

  struct Entry {
    int n;
    const char* name;
    bool (*fn)();
  };
  const Entry entries[] = {
      {1, "risk values match the LP dual maximum", criterion_1},
      {2, "projections match oracles and satisfy VI/nonexpansiveness", criterion_2},
      {3, "subgradients match finite differences", criterion_3},
      {4, "composite estimator is unbiased", criterion_4},
      {5, "convex run reaches the full-batch oracle optimum", criterion_5},
      {6, "kappa=0 run matches the SGD baseline", criterion_6},
      {7, "per-iteration sampling cost contract", criterion_7},
      {8, "risk-averse run wins the upper tail under contamination", criterion_8},
      {9, "manifest rerun reproduces artifacts bit-exactly", criterion_9},
      {10, "non-convex smoke run stays finite and tracks", criterion_10},
  };

  bool all_ok = true;
  for (const auto& e : entries) {
    if (only && e.n != only) continue;
    std::printf("criterion %d: %s\n", e.n, e.name);
    bool ok = false;
    try {
      ok = e.fn();
    } catch (const std::exception& ex) {
      std::printf("  exception: %s\n", ex.what());
    }
    std::printf("[%s] criterion %d\n", ok ? "PASS" : "FAIL", e.n);
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
