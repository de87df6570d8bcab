#include "dro/loss.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dro/kernels.hpp"

namespace dro {

namespace {

void check_dimension(std::size_t expect, std::size_t got, const char* what) {
  if (expect != got) {
    std::ostringstream msg;
    msg << what << " dimension mismatch: expected " << expect << ", got " << got;
    throw std::invalid_argument(msg.str());
  }
}

// sigma(-t) = 1 / (1 + e^t), overflow-safe for both signs.
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

// ---------------------------------------------------------------- logistic

LogisticLoss::LogisticLoss(std::size_t dimension) : dim_(dimension) {
  if (dim_ == 0) throw std::invalid_argument("LogisticLoss: dimension must be positive");
}

double LogisticLoss::value(std::span<const double> x, const DataSample& s) const {
  check_dimension(dim_, x.size(), "LogisticLoss x");
  check_dimension(dim_, s.features.size(), "LogisticLoss sample");
  const double t = s.label * kern::dot(s.features, x);
  if (t >= 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

void LogisticLoss::subgradient(std::span<const double> x, const DataSample& s,
                               std::span<double> out) const {
  value_and_subgradient(x, s, out);
}

double LogisticLoss::value_and_subgradient(std::span<const double> x, const DataSample& s,
                                           std::span<double> out) const {
  check_dimension(dim_, x.size(), "LogisticLoss x");
  check_dimension(dim_, s.features.size(), "LogisticLoss sample");
  check_dimension(dim_, out.size(), "LogisticLoss out");
  const double t = s.label * kern::dot(s.features, x);
  const double coeff = -s.label * sigmoid_neg(t);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = coeff * s.features[i];
  if (t >= 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

std::string LogisticLoss::spec() const { return "logistic"; }

// ------------------------------------------------------------ least squares

LeastSquaresLoss::LeastSquaresLoss(std::size_t dimension) : dim_(dimension) {
  if (dim_ == 0) throw std::invalid_argument("LeastSquaresLoss: dimension must be positive");
}

double LeastSquaresLoss::value(std::span<const double> x, const DataSample& s) const {
  check_dimension(dim_, x.size(), "LeastSquaresLoss x");
  check_dimension(dim_, s.features.size(), "LeastSquaresLoss sample");
  const double r = kern::dot(s.features, x) - s.label;
  return r * r;
}

void LeastSquaresLoss::subgradient(std::span<const double> x, const DataSample& s,
                                   std::span<double> out) const {
  value_and_subgradient(x, s, out);
}

double LeastSquaresLoss::value_and_subgradient(std::span<const double> x,
                                               const DataSample& s,
                                               std::span<double> out) const {
  check_dimension(dim_, x.size(), "LeastSquaresLoss x");
  check_dimension(dim_, s.features.size(), "LeastSquaresLoss sample");
  check_dimension(dim_, out.size(), "LeastSquaresLoss out");
  const double r = kern::dot(s.features, x) - s.label;
  for (std::size_t i = 0; i < dim_; ++i) out[i] = 2.0 * r * s.features[i];
  return r * r;
}

std::string LeastSquaresLoss::spec() const { return "least_squares"; }

// -------------------------------------------------------------------- MLP

MlpReluLoss::MlpReluLoss(std::vector<std::size_t> layer_sizes)
    : layers_(std::move(layer_sizes)) {
  if (layers_.size() < 2)
    throw std::invalid_argument("MlpReluLoss: need at least input and output sizes");
  for (std::size_t n : layers_)
    if (n == 0) throw std::invalid_argument("MlpReluLoss: zero-width layer");
  param_count_ = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l)
    param_count_ += layers_[l + 1] * layers_[l] + layers_[l + 1];
}

double MlpReluLoss::value(std::span<const double> x, const DataSample& s) const {
  return forward_backward(x, s, {}, false);
}

void MlpReluLoss::subgradient(std::span<const double> x, const DataSample& s,
                              std::span<double> out) const {
  forward_backward(x, s, out, true);
}

double MlpReluLoss::value_and_subgradient(std::span<const double> x, const DataSample& s,
                                          std::span<double> out) const {
  return forward_backward(x, s, out, true);
}

double MlpReluLoss::forward_backward(std::span<const double> x, const DataSample& s,
                                     std::span<double> grad, bool want_grad) const {
  check_dimension(param_count_, x.size(), "MlpReluLoss x");
  check_dimension(layers_.front(), s.features.size(), "MlpReluLoss sample");
  if (want_grad) check_dimension(param_count_, grad.size(), "MlpReluLoss out");

  const std::size_t n_layers = layers_.size() - 1;
  const std::size_t n_out = layers_.back();
  const long label = std::lround(s.label);
  if (label < 0 || static_cast<std::size_t>(label) >= n_out ||
      static_cast<double>(label) != s.label)
    throw std::invalid_argument("MlpReluLoss: label is not a class index in range");

  // Forward pass, keeping pre-activations for the backward sweep.
  std::vector<std::vector<double>> acts(n_layers + 1);
  std::vector<std::vector<double>> pre(n_layers);
  acts[0].assign(s.features.begin(), s.features.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t rows = layers_[l + 1], cols = layers_[l];
    pre[l].resize(rows);
    kern::matvec(x.subspan(offset, rows * cols), rows, cols, acts[l], pre[l]);
    const std::size_t bias_off = offset + rows * cols;
    for (std::size_t r = 0; r < rows; ++r) pre[l][r] += x[bias_off + r];
    acts[l + 1].resize(rows);
    if (l + 1 < n_layers) {
      for (std::size_t r = 0; r < rows; ++r) acts[l + 1][r] = std::max(0.0, pre[l][r]);
    } else {
      acts[l + 1] = pre[l];  // logits
    }
    offset = bias_off + rows;
  }

  const std::vector<double>& logits = acts[n_layers];
  double max_logit = logits[0];
  for (double v : logits) max_logit = std::max(max_logit, v);
  double exp_sum = 0.0;
  for (double v : logits) exp_sum += std::exp(v - max_logit);
  const double lse = max_logit + std::log(exp_sum);
  const double loss = lse - logits[static_cast<std::size_t>(label)];
  if (!want_grad) return loss;

  // Backward pass. delta starts as softmax - onehot(label).
  std::vector<double> delta(n_out);
  for (std::size_t r = 0; r < n_out; ++r)
    delta[r] = std::exp(logits[r] - lse) - (static_cast<long>(r) == label ? 1.0 : 0.0);

  // Layer parameter offsets, walked in reverse.
  std::vector<std::size_t> offsets(n_layers);
  std::size_t off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += layers_[l + 1] * layers_[l] + layers_[l + 1];
  }

  std::vector<double> delta_prev;
  for (std::size_t li = n_layers; li-- > 0;) {
    const std::size_t rows = layers_[li + 1], cols = layers_[li];
    const std::size_t w_off = offsets[li];
    const std::size_t b_off = w_off + rows * cols;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = delta[r];
      double* grow = grad.data() + w_off + r * cols;
      const double* a = acts[li].data();
      for (std::size_t c = 0; c < cols; ++c) grow[c] = d * a[c];
      grad[b_off + r] = d;
    }
    if (li > 0) {
      delta_prev.resize(cols);
      kern::matvec_t(x.subspan(w_off, rows * cols), rows, cols, delta, delta_prev);
      // ReLU kink convention: derivative 0 at pre-activation exactly 0.
      for (std::size_t c = 0; c < cols; ++c)
        if (!(pre[li - 1][c] > 0.0)) delta_prev[c] = 0.0;
      delta.swap(delta_prev);
    }
  }
  return loss;
}

std::string MlpReluLoss::spec() const {
  std::ostringstream s;
  s << "mlp ";
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (i) s << ",";
    s << layers_[i];
  }
  return s.str();
}

// -------------------------------------------------------------- estimates

StochasticEstimates make_estimates(const LossModel& model, std::span<const double> x_next,
                                   double u, const RiskParams& params,
                                   SampleSource& sampler, int batch) {
  if (batch < 1) throw std::invalid_argument("make_estimates: batch must be >= 1");
  const std::size_t n = model.dimension();
  const double kappa = params.kappa();

  StochasticEstimates est;
  est.g_x.assign(n, 0.0);
  est.j_tilde.assign(n, 0.0);
  est.composite.assign(n, 0.0);

  std::vector<double> s1(n), s2(n);
  for (int i = 0; i < batch; ++i) {
    const DataSample& d1 = sampler.next();
    const double loss1 = model.value_and_subgradient(x_next, d1, s1);
    est.h_tilde += loss1;
    est.samples_used += 1;
    if (loss1 < u) {
      // One sample suffices: the g_u contribution is zero and the same
      // selection serves both g_x and j_tilde.
      kern::axpy(1.0, s1, est.g_x);
      kern::axpy(1.0, s1, est.j_tilde);
      kern::axpy(1.0, s1, est.composite);
    } else {
      const DataSample& d2 = sampler.next();
      model.subgradient(x_next, d2, s2);
      est.samples_used += 1;
      est.g_u += -kappa;
      kern::axpy(1.0 + kappa, s1, est.g_x);
      kern::axpy(1.0, s2, est.j_tilde);
      kern::axpy(1.0 + kappa, s1, est.composite);
      kern::axpy(-kappa, s2, est.composite);
    }
  }
  const double inv = 1.0 / static_cast<double>(batch);
  kern::scale(est.g_x, inv);
  kern::scale(est.j_tilde, inv);
  kern::scale(est.composite, inv);
  est.g_u *= inv;
  est.h_tilde *= inv;
  return est;
}

}  // namespace dro
