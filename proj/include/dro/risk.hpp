#pragma once

#include <span>
#include <utility>
#include <vector>

namespace dro {

class LossModel;
class Dataset;

// Robustness level for the mean plus upper-semideviation risk
//   rho[Z] = E[Z] + kappa * E[max(0, Z - E[Z])],  kappa in [0, 1].
// kappa = 0 is the plain mean; kappa = 1 the most conservative level that
// keeps the measure coherent.
class RiskParams {
 public:
  explicit RiskParams(double kappa);
  double kappa() const { return kappa_; }

 private:
  double kappa_;
};

// Finite-support distribution of loss values. Weights are nonnegative and
// sum to one within 1e-12.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution(std::vector<double> losses, std::vector<double> weights);
  // Uniform weights 1/n.
  static EmpiricalDistribution uniform(std::vector<double> losses);

  std::span<const double> losses() const { return losses_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return losses_.size(); }

 private:
  std::vector<double> losses_;
  std::vector<double> weights_;
};

// Values of the composite reformulation at a point (x, u):
//   f(x,u) = E[l(x,D) + kappa * max(0, l(x,D) - u)]
//   h(x)   = E[l(x,D)]
//   F(x)   = f(x, h(x))
struct CompositeValue {
  double f_value = 0.0;
  double h_value = 0.0;
  double robust_value = 0.0;
};

// E[Z] + kappa * E[max(0, Z - E[Z])] evaluated exactly on the support.
double evaluate_risk(const EmpiricalDistribution& dist, const RiskParams& params);

// Worst-case reweighting density mu over the support: maximizes
// sum_i mu_i w_i Z_i over mu = 1 + xi - E[xi], 0 <= xi <= kappa.
// The maximizer sets xi_i = kappa exactly where Z_i > E[Z] (ties get 0).
// Returns (mu, maximum value); the value equals evaluate_risk.
std::pair<std::vector<double>, double> worst_case_reweighting(
    const EmpiricalDistribution& dist, const RiskParams& params);

// f, h, and F over a finite dataset at parameters x and inner value u.
CompositeValue evaluate_composite(const LossModel& model, const Dataset& data,
                                  std::span<const double> x, double u,
                                  const RiskParams& params);

}  // namespace dro
