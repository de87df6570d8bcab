#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dro/risk.hpp"
#include "dro/sample.hpp"

namespace dro {

// A loss l(x, sample) that is differentiable in a generalized sense in x,
// with a deterministic subgradient selection. At differentiable points the
// selection is the gradient; at ReLU kinks the unit's derivative is taken
// as 0. Evaluation is pure; safe to share across threads.
class LossModel {
 public:
  virtual ~LossModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> x, const DataSample& s) const = 0;
  // Writes one element of the subdifferential at x into out (size dimension()).
  virtual void subgradient(std::span<const double> x, const DataSample& s,
                           std::span<double> out) const = 0;
  // Loss value and subgradient in one pass; overridden where the forward
  // pass can be shared.
  virtual double value_and_subgradient(std::span<const double> x, const DataSample& s,
                                       std::span<double> out) const {
    subgradient(x, s, out);
    return value(x, s);
  }

  // Short spec string ("logistic", "mlp 20,10,3", ...) for solution headers.
  virtual std::string spec() const = 0;
};

// log(1 + exp(-b a^T x)), labels b in {-1, +1}. Stable log1p evaluation on
// both sides of the exponent.
class LogisticLoss final : public LossModel {
 public:
  explicit LogisticLoss(std::size_t dimension);
  std::size_t dimension() const override { return dim_; }
  double value(std::span<const double> x, const DataSample& s) const override;
  void subgradient(std::span<const double> x, const DataSample& s,
                   std::span<double> out) const override;
  double value_and_subgradient(std::span<const double> x, const DataSample& s,
                               std::span<double> out) const override;
  std::string spec() const override;

 private:
  std::size_t dim_;
};

// (a^T x - b)^2.
class LeastSquaresLoss final : public LossModel {
 public:
  explicit LeastSquaresLoss(std::size_t dimension);
  std::size_t dimension() const override { return dim_; }
  double value(std::span<const double> x, const DataSample& s) const override;
  void subgradient(std::span<const double> x, const DataSample& s,
                   std::span<double> out) const override;
  double value_and_subgradient(std::span<const double> x, const DataSample& s,
                               std::span<double> out) const override;
  std::string spec() const override;

 private:
  std::size_t dim_;
};

// Fully-connected ReLU network with softmax cross-entropy loss. Parameters
// live in one flat vector: for each layer in forward order, the weight
// matrix row-major (out x in) followed by the bias (out). Labels are class
// indices in [0, n_classes). ReLU derivative at a pre-activation of exactly
// zero is taken as 0.
class MlpReluLoss final : public LossModel {
 public:
  explicit MlpReluLoss(std::vector<std::size_t> layer_sizes);
  std::size_t dimension() const override { return param_count_; }
  double value(std::span<const double> x, const DataSample& s) const override;
  void subgradient(std::span<const double> x, const DataSample& s,
                   std::span<double> out) const override;
  double value_and_subgradient(std::span<const double> x, const DataSample& s,
                               std::span<double> out) const override;
  std::string spec() const override;

  std::span<const std::size_t> layers() const { return layers_; }
  std::size_t n_classes() const { return layers_.back(); }

 private:
  double forward_backward(std::span<const double> x, const DataSample& s,
                          std::span<double> grad, bool want_grad) const;

  std::vector<std::size_t> layers_;
  std::size_t param_count_;
};

// One iteration's sampled quantities for the composite problem, averaged
// over the batch:
//   g_x     estimate of the x-part of a subgradient of f at (x, u)
//   g_u     estimate of the u-part, in [-kappa, 0]
//   h_tilde estimate of h(x)
//   j_tilde estimate of an element of the subdifferential of h at x
//   composite  average of the per-draw vectors g_x + g_u * j_tilde; this is
//              the direction fed into the subgradient averaging recursion
//              (equals g_x + g_u * j_tilde exactly when batch = 1)
//   samples_used  total data draws consumed == subgradient evaluations
struct StochasticEstimates {
  std::vector<double> g_x;
  double g_u = 0.0;
  double h_tilde = 0.0;
  std::vector<double> j_tilde;
  std::vector<double> composite;
  int samples_used = 0;
};

// Builds the stochastic estimates at (x, u) from `batch` independent draws.
// Per draw D1: if l(x, D1) < u, one sample suffices (g_u contribution 0,
// the same selected subgradient serves g_x and j_tilde); otherwise the
// penalized branch applies a (1 + kappa) factor, contributes -kappa to g_u,
// and j_tilde comes from a fresh independent draw D2. A tie l(x, D1) = u
// takes the penalized branch.
StochasticEstimates make_estimates(const LossModel& model, std::span<const double> x_next,
                                   double u, const RiskParams& params,
                                   SampleSource& sampler, int batch);

}  // namespace dro
