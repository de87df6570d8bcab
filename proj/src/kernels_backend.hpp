#pragma once

#include "dro/kernels.hpp"

// Internal: AVX2 kernel entry points, compiled only when DRO_HAVE_AVX2 is
// set for this build. Declarations are unconditional; the dispatcher only
// references them behind the same macro.

namespace dro::kern::avx2 {

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

}  // namespace dro::kern::avx2
