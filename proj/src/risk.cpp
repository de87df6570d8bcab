#include "dro/risk.hpp"

#include <cmath>
#include <stdexcept>

#include "dro/data.hpp"
#include "dro/kernels.hpp"
#include "dro/loss.hpp"

namespace dro {

RiskParams::RiskParams(double kappa) : kappa_(kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw std::invalid_argument("RiskParams: kappa must be in [0, 1]");
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> losses,
                                             std::vector<double> weights)
    : losses_(std::move(losses)), weights_(std::move(weights)) {
  if (losses_.empty()) throw std::invalid_argument("EmpiricalDistribution: empty support");
  if (losses_.size() != weights_.size())
    throw std::invalid_argument("EmpiricalDistribution: losses/weights length mismatch");
  for (double w : weights_)
    if (!(w >= 0.0))
      throw std::invalid_argument("EmpiricalDistribution: negative weight");
  const double total = kern::sum(weights_);
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("EmpiricalDistribution: weights must sum to 1");
}

EmpiricalDistribution EmpiricalDistribution::uniform(std::vector<double> losses) {
  const std::size_t n = losses.size();
  if (n == 0) throw std::invalid_argument("EmpiricalDistribution: empty support");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return EmpiricalDistribution(std::move(losses), std::move(w));
}

double evaluate_risk(const EmpiricalDistribution& dist, const RiskParams& params) {
  const double mean = kern::dot(dist.weights(), dist.losses());
  const double semidev = kern::hinge_dot(dist.weights(), dist.losses(), mean);
  return mean + params.kappa() * semidev;
}

std::pair<std::vector<double>, double> worst_case_reweighting(
    const EmpiricalDistribution& dist, const RiskParams& params) {
  const double kappa = params.kappa();
  const double mean = kern::dot(dist.weights(), dist.losses());

  // The objective is linear in xi over the box [0, kappa]^n with coefficient
  // w_i (Z_i - mean), so the maximizer saturates xi exactly where Z_i > mean.
  // Ties Z_i = mean contribute zero and take xi_i = 0 for determinism.
  const std::size_t n = dist.size();
  std::vector<double> xi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (dist.losses()[i] > mean) xi[i] = kappa;

  const double mean_xi = kern::dot(dist.weights(), xi);
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = 1.0 + xi[i] - mean_xi;

  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    value += dist.weights()[i] * mu[i] * dist.losses()[i];
  return {std::move(mu), value};
}

CompositeValue evaluate_composite(const LossModel& model, const Dataset& data,
                                  std::span<const double> x, double u,
                                  const RiskParams& params) {
  if (data.size() == 0) throw std::invalid_argument("evaluate_composite: empty dataset");
  if (x.size() != model.dimension())
    throw std::invalid_argument("evaluate_composite: x dimension mismatch");

  std::vector<double> losses(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    losses[i] = model.value(x, data.samples()[i]);

  const double inv_n = 1.0 / static_cast<double>(data.size());
  const double kappa = params.kappa();
  CompositeValue out;
  out.h_value = kern::sum(losses) * inv_n;
  out.f_value = out.h_value + kappa * kern::hinge_sum(losses, u) * inv_n;
  out.robust_value = out.h_value + kappa * kern::hinge_sum(losses, out.h_value) * inv_n;
  return out;
}

}  // namespace dro
