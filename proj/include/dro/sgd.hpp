#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dro/feasible_set.hpp"
#include "dro/loss.hpp"
#include "dro/schedule.hpp"
#include "dro/sts.hpp"

namespace dro {

class Dataset;

struct SgdParams {
  int batch = 1;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 0;
};

struct SgdResult {
  std::vector<double> x;
  std::vector<IterationRecord> records;
};

// Projected stochastic subgradient descent on the plain expected loss:
// x <- project(x - tau * s) with s the batch-averaged subgradient. Records
// share the solver telemetry schema; eta holds the stationarity proxy
// ||x - project(x - s)||, u_minus_h is zero, robust_obj is the exact mean
// loss on `data`.
SgdResult run_sgd(const SgdParams& params, const StepSchedule& schedule,
                  const FeasibleSet& set, const LossModel& model,
                  const Dataset& data, std::size_t telemetry_interval,
                  std::optional<std::vector<double>> x0 = std::nullopt);

}  // namespace dro
