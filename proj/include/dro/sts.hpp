#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dro/feasible_set.hpp"
#include "dro/loss.hpp"
#include "dro/sample.hpp"
#include "dro/schedule.hpp"

namespace dro {

class Dataset;

struct SolverParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double kappa = 0.0;
  int batch = 1;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 0;
};

struct SolverState {
  std::size_t k = 0;
  std::vector<double> x;
  std::vector<double> z;
  double u = 0.0;
  double last_eta = 0.0;
  // Cumulative count of stochastic subgradient evaluations, including the
  // single estimate used to initialize z.
  std::int64_t total_samples = 0;
};

struct IterationRecord {
  std::size_t k = 0;
  double tau = 0.0;
  double eta = 0.0;
  double u_minus_h = 0.0;
  double robust_obj = 0.0;
  std::int64_t samples = 0;
};

struct RunResult {
  SolverState state;
  std::vector<IterationRecord> records;
};

// x starts at x0 (must be feasible) or at the projection of the origin;
// u is seeded with a 32-draw average of the loss and z with one composite
// subgradient estimate at (x, u).
SolverState init_state(const SolverParams& params, const FeasibleSet& set,
                       const LossModel& model, SampleSource& sampler,
                       std::optional<std::vector<double>> x0 = std::nullopt);

// Advances the state by one iteration and returns the step size used.
double iterate(SolverState& state, const SolverParams& params,
               const StepSchedule& schedule, const FeasibleSet& set,
               const LossModel& model, SampleSource& sampler);

// Full run with telemetry. Samples are drawn uniformly from `data` with the
// params seed; h and the robust objective in each record are evaluated
// exactly on `data` at every telemetry interval and after the last iteration.
RunResult run(const SolverParams& params, const StepSchedule& schedule,
              const FeasibleSet& set, const LossModel& model,
              const Dataset& data, std::size_t telemetry_interval,
              std::optional<std::vector<double>> x0 = std::nullopt);

// Columns: k,tau,eta,u_minus_h,robust_obj,samples.
void write_telemetry_csv(const std::vector<IterationRecord>& records,
                         const std::string& path);

}  // namespace dro
