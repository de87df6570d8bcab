#include "dro/sgd.hpp"

#include <cmath>
#include <stdexcept>

#include "dro/data.hpp"
#include "dro/kernels.hpp"
#include "dro/risk.hpp"

namespace dro {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace

SgdResult run_sgd(const SgdParams& params, const StepSchedule& schedule,
                  const FeasibleSet& set, const LossModel& model,
                  const Dataset& data, std::size_t telemetry_interval,
                  std::optional<std::vector<double>> x0) {
  if (params.batch < 1) throw std::invalid_argument("run_sgd: batch must be >= 1");
  if (params.max_iters < 1)
    throw std::invalid_argument("run_sgd: max_iters must be >= 1");
  if (telemetry_interval < 1)
    throw std::invalid_argument("run_sgd: telemetry_interval must be >= 1");

  const std::size_t dim = model.dimension();
  UniformSampler sampler(data, params.seed);

  SgdResult result;
  if (x0) {
    if (x0->size() != dim)
      throw std::invalid_argument("run_sgd: x0 dimension mismatch");
    if (!set.contains(*x0))
      throw std::invalid_argument("run_sgd: x0 is outside the feasible set");
    result.x = std::move(*x0);
  } else {
    result.x = set.project(std::vector<double>(dim, 0.0));
  }
  result.records.reserve(params.max_iters / telemetry_interval + 2);

  const RiskParams plain_risk(0.0);
  std::vector<double> grad(dim), sample_grad(dim), target(dim), proxy_point(dim);
  std::int64_t samples = 0;

  for (std::size_t k = 0; k < params.max_iters; ++k) {
    const double tau = schedule.tau(k, 1.0);

    std::fill(grad.begin(), grad.end(), 0.0);
    for (int i = 0; i < params.batch; ++i) {
      model.subgradient(result.x, sampler.next(), sample_grad);
      kern::axpy(1.0 / params.batch, sample_grad, grad);
    }
    samples += params.batch;

    for (std::size_t i = 0; i < dim; ++i) target[i] = result.x[i] - grad[i];
    set.project(target, proxy_point);
    const double eta_proxy = distance(result.x, proxy_point);

    for (std::size_t i = 0; i < dim; ++i) target[i] = result.x[i] - tau * grad[i];
    set.project(target, result.x);

    for (double v : result.x)
      if (!std::isfinite(v))
        throw std::runtime_error("sgd state became non-finite at iteration " +
                                 std::to_string(k) + " (seed " +
                                 std::to_string(params.seed) + ")");

    const bool at_interval = (k + 1) % telemetry_interval == 0;
    const bool at_end = k + 1 == params.max_iters;
    if (!at_interval && !at_end) continue;
    const CompositeValue cv = evaluate_composite(model, data, result.x, 0.0, plain_risk);
    result.records.push_back({k + 1, tau, eta_proxy, 0.0, cv.h_value, samples});
  }
  return result;
}

}  // namespace dro
