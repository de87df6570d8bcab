#include "dro/kernels.hpp"

#include <stdexcept>
#include <string>

#include "kernels_backend.hpp"

namespace dro::kern {

namespace {

struct Table {
  double (*sum)(std::span<const double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*hinge_sum)(std::span<const double>, double);
  double (*hinge_dot)(std::span<const double>, std::span<const double>, double);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*blend)(std::span<double>, std::span<const double>, double);
  void (*scale)(std::span<double>, double);
  void (*clamp)(std::span<const double>, std::span<const double>,
                std::span<const double>, std::span<double>);
  void (*matvec)(std::span<const double>, std::size_t, std::size_t,
                 std::span<const double>, std::span<double>);
  void (*matvec_t)(std::span<const double>, std::size_t, std::size_t,
                   std::span<const double>, std::span<double>);
};

constexpr Table kScalarTable = {
    scalar::sum,   scalar::dot,   scalar::hinge_sum, scalar::hinge_dot,
    scalar::axpy,  scalar::blend, scalar::scale,     scalar::clamp,
    scalar::matvec, scalar::matvec_t,
};

#if DRO_HAVE_AVX2
constexpr Table kAvx2Table = {
    avx2::sum,   avx2::dot,   avx2::hinge_sum, avx2::hinge_dot,
    avx2::axpy,  avx2::blend, avx2::scale,     avx2::clamp,
    avx2::matvec, avx2::matvec_t,
};
#endif

struct State {
  Backend backend;
  const Table* table;
};

State make_initial_state() {
  const Backend b = detect_backend();
#if DRO_HAVE_AVX2
  if (b == Backend::avx2) return {Backend::avx2, &kAvx2Table};
#endif
  return {Backend::scalar, &kScalarTable};
}

State& state() {
  static State s = make_initial_state();
  return s;
}

}  // namespace

Backend detect_backend() {
#if DRO_HAVE_AVX2
  if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
  return Backend::scalar;
}

Backend active_backend() { return state().backend; }

bool backend_supported(Backend b) {
  if (b == Backend::scalar) return true;
#if DRO_HAVE_AVX2
  if (b == Backend::avx2) return __builtin_cpu_supports("avx2");
#endif
  return false;
}

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw std::invalid_argument("kernel backend '" + std::string(backend_name(b)) +
                                "' is not supported on this machine/build");
  if (b == Backend::scalar) {
    state() = {Backend::scalar, &kScalarTable};
    return;
  }
#if DRO_HAVE_AVX2
  state() = {Backend::avx2, &kAvx2Table};
#endif
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

Backend resolve_backend(std::string_view name) {
  if (name == "auto") return detect_backend();
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  throw std::invalid_argument("unknown kernel backend '" + std::string(name) +
                              "' (expected scalar, avx2, or auto)");
}

double sum(std::span<const double> x) { return state().table->sum(x); }

double dot(std::span<const double> x, std::span<const double> y) {
  return state().table->dot(x, y);
}

double hinge_sum(std::span<const double> x, double threshold) {
  return state().table->hinge_sum(x, threshold);
}

double hinge_dot(std::span<const double> w, std::span<const double> x, double threshold) {
  return state().table->hinge_dot(w, x, threshold);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  state().table->axpy(alpha, x, y);
}

void blend(std::span<double> x, std::span<const double> y, double t) {
  state().table->blend(x, y, t);
}

void scale(std::span<double> x, double alpha) { state().table->scale(x, alpha); }

void clamp(std::span<const double> p, std::span<const double> lo,
           std::span<const double> hi, std::span<double> out) {
  state().table->clamp(p, lo, hi, out);
}

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  state().table->matvec(w, rows, cols, x, y);
}

void matvec_t(std::span<const double> w, std::size_t rows, std::size_t cols,
              std::span<const double> x, std::span<double> y) {
  state().table->matvec_t(w, rows, cols, x, y);
}

}  // namespace dro::kern
