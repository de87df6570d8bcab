#include "dro/sts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dro/data.hpp"
#include "dro/kernels.hpp"
#include "dro/risk.hpp"

namespace dro {

namespace {

constexpr int kInitDraws = 32;

void check_params(const SolverParams& p) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !(p.c > 0.0))
    throw std::invalid_argument("SolverParams: a, b, c must be positive");
  if (p.batch < 1) throw std::invalid_argument("SolverParams: batch must be >= 1");
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_state_finite(const SolverState& s, std::uint64_t seed) {
  if (all_finite(s.x) && all_finite(s.z) && std::isfinite(s.u) &&
      std::isfinite(s.last_eta))
    return;
  throw std::runtime_error("solver state became non-finite at iteration " +
                           std::to_string(s.k) + " (seed " + std::to_string(seed) +
                           ")");
}

std::string fmt_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SolverState init_state(const SolverParams& params, const FeasibleSet& set,
                       const LossModel& model, SampleSource& sampler,
                       std::optional<std::vector<double>> x0) {
  check_params(params);
  const RiskParams risk(params.kappa);
  const std::size_t dim = model.dimension();

  SolverState s;
  if (x0) {
    if (x0->size() != dim)
      throw std::invalid_argument("init_state: x0 dimension mismatch");
    if (!set.contains(*x0))
      throw std::invalid_argument("init_state: x0 is outside the feasible set");
    s.x = std::move(*x0);
  } else {
    s.x = set.project(std::vector<double>(dim, 0.0));
  }

  double loss_sum = 0.0;
  for (int i = 0; i < kInitDraws; ++i) loss_sum += model.value(s.x, sampler.next());
  s.u = loss_sum / kInitDraws;

  const StochasticEstimates est = make_estimates(model, s.x, s.u, risk, sampler, 1);
  s.z = est.composite;
  s.total_samples = est.samples_used;
  s.k = 0;
  s.last_eta = 0.0;
  check_state_finite(s, params.seed);
  return s;
}

double iterate(SolverState& state, const SolverParams& params,
               const StepSchedule& schedule, const FeasibleSet& set,
               const LossModel& model, SampleSource& sampler) {
  check_params(params);
  const RiskParams risk(params.kappa);
  const double tau = schedule.tau(state.k, params.a);

  GapDiagnostic diag = set.solve_prox_step(state.x, state.z, params.c);

  // dx = y - x is needed for the u update after x has already moved.
  std::vector<double> dx(state.x.size());
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = diag.y_bar[i] - state.x[i];

  kern::blend(state.x, diag.y_bar, tau);
  set.project(state.x, state.x);

  const StochasticEstimates est =
      make_estimates(model, state.x, state.u, risk, sampler, params.batch);

  kern::blend(state.z, est.composite, params.a * tau);
  state.u += tau * kern::dot(est.j_tilde, dx) +
             params.b * tau * (est.h_tilde - state.u);

  state.k += 1;
  state.last_eta = diag.eta;
  state.total_samples += est.samples_used;
  check_state_finite(state, params.seed);
  return tau;
}

RunResult run(const SolverParams& params, const StepSchedule& schedule,
              const FeasibleSet& set, const LossModel& model,
              const Dataset& data, std::size_t telemetry_interval,
              std::optional<std::vector<double>> x0) {
  check_params(params);
  if (params.max_iters < 1)
    throw std::invalid_argument("run: max_iters must be >= 1");
  if (telemetry_interval < 1)
    throw std::invalid_argument("run: telemetry_interval must be >= 1");
  const RiskParams risk(params.kappa);

  UniformSampler sampler(data, params.seed);
  RunResult result;
  result.state = init_state(params, set, model, sampler, std::move(x0));
  result.records.reserve(params.max_iters / telemetry_interval + 2);

  for (std::size_t k = 0; k < params.max_iters; ++k) {
    const double tau = iterate(result.state, params, schedule, set, model, sampler);
    const bool at_interval = result.state.k % telemetry_interval == 0;
    const bool at_end = result.state.k == params.max_iters;
    if (!at_interval && !at_end) continue;
    const CompositeValue cv =
        evaluate_composite(model, data, result.state.x, result.state.u, risk);
    result.records.push_back({result.state.k, tau, result.state.last_eta,
                              result.state.u - cv.h_value, cv.robust_value,
                              result.state.total_samples});
  }
  return result;
}

void write_telemetry_csv(const std::vector<IterationRecord>& records,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open telemetry file: " + path);
  out << "k,tau,eta,u_minus_h,robust_obj,samples\n";
  for (const auto& r : records) {
    out << r.k << ',' << fmt_g17(r.tau) << ',' << fmt_g17(r.eta) << ','
        << fmt_g17(r.u_minus_h) << ',' << fmt_g17(r.robust_obj) << ','
        << r.samples << '\n';
  }
  if (!out) throw std::runtime_error("failed writing telemetry file: " + path);
}

}  // namespace dro
