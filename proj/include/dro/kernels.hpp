#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace dro::kern {

// Vector arithmetic kernels behind the numeric hot paths: per-sample dot
// products, dataset reductions, solver state updates, projections, and the
// MLP matvecs. Every kernel has a scalar reference implementation and, on
// x86-64, an AVX2 variant; the active backend is chosen at runtime.
//
// Reductions (sum, dot, hinge_*) accumulate pairwise over fixed-size blocks,
// so results are deterministic for a given backend and input length.

enum class Backend { scalar, avx2 };

// Best backend supported by the running CPU and this build.
Backend detect_backend();
Backend active_backend();
bool backend_supported(Backend b);
// Throws std::invalid_argument if the backend is not supported here.
void set_backend(Backend b);

std::string_view backend_name(Backend b);
// Accepts "scalar", "avx2", or "auto" (resolves to detect_backend()).
Backend resolve_backend(std::string_view name);

// sum x[i]
double sum(std::span<const double> x);
// sum x[i] * y[i]
double dot(std::span<const double> x, std::span<const double> y);
// sum max(0, x[i] - threshold)
double hinge_sum(std::span<const double> x, double threshold);
// sum w[i] * max(0, x[i] - threshold)
double hinge_dot(std::span<const double> w, std::span<const double> x, double threshold);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// x += t * (y - x)
void blend(std::span<double> x, std::span<const double> y, double t);
// x *= alpha
void scale(std::span<double> x, double alpha);
// out[i] = min(max(p[i], lo[i]), hi[i])
void clamp(std::span<const double> p, std::span<const double> lo,
           std::span<const double> hi, std::span<double> out);
// y = W x, W row-major (rows x cols)
void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
// y = W^T x, W row-major (rows x cols), x has rows entries, y has cols
void matvec_t(std::span<const double> w, std::size_t rows, std::size_t cols,
              std::span<const double> x, std::span<double> y);

inline double squared_norm(std::span<const double> x) { return dot(x, x); }

// Reference implementations, always available; the equivalence tests compare
// the dispatched kernels against these.
namespace scalar {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double hinge_sum(std::span<const double> x, double threshold);
double hinge_dot(std::span<const double> w, std::span<const double> x, double threshold);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void blend(std::span<double> x, std::span<const double> y, double t);
void scale(std::span<double> x, double alpha);
void clamp(std::span<const double> p, std::span<const double> lo,
           std::span<const double> hi, std::span<double> out);
void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matvec_t(std::span<const double> w, std::size_t rows, std::size_t cols,
              std::span<const double> x, std::span<double> y);
}  // namespace scalar

}  // namespace dro::kern
