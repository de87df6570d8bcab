#include "dro/kernels.hpp"

#include <algorithm>

namespace dro::kern::scalar {

namespace {

constexpr std::size_t kBlock = 32;

double sum_rec(const double* x, std::size_t n) {
  if (n <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return sum_rec(x, half) + sum_rec(x + half, n - half);
}

double dot_rec(const double* x, const double* y, std::size_t n) {
  if (n <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  const std::size_t half = n / 2;
  return dot_rec(x, y, half) + dot_rec(x + half, y + half, n - half);
}

double hinge_sum_rec(const double* x, std::size_t n, double t) {
  if (n <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::max(0.0, x[i] - t);
    return s;
  }
  const std::size_t half = n / 2;
  return hinge_sum_rec(x, half, t) + hinge_sum_rec(x + half, n - half, t);
}

double hinge_dot_rec(const double* w, const double* x, std::size_t n, double t) {
  if (n <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * std::max(0.0, x[i] - t);
    return s;
  }
  const std::size_t half = n / 2;
  return hinge_dot_rec(w, x, half, t) + hinge_dot_rec(w + half, x + half, n - half, t);
}

}  // namespace

double sum(std::span<const double> x) { return sum_rec(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  return dot_rec(x.data(), y.data(), x.size());
}

double hinge_sum(std::span<const double> x, double threshold) {
  return hinge_sum_rec(x.data(), x.size(), threshold);
}

double hinge_dot(std::span<const double> w, std::span<const double> x, double threshold) {
  return hinge_dot_rec(w.data(), x.data(), x.size(), threshold);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void blend(std::span<double> x, std::span<const double> y, double t) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * (y[i] - x[i]);
}

void scale(std::span<double> x, double alpha) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= alpha;
}

void clamp(std::span<const double> p, std::span<const double> lo,
           std::span<const double> hi, std::span<double> out) {
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = std::min(std::max(p[i], lo[i]), hi[i]);
}

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r)
    y[r] = dot_rec(w.data() + r * cols, x.data(), cols);
}

void matvec_t(std::span<const double> w, std::size_t rows, std::size_t cols,
              std::span<const double> x, std::span<double> y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double xr = x[r];
    const double* wr = w.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += xr * wr[c];
  }
}

}  // namespace dro::kern::scalar
