#include "kernels_backend.hpp"

#include <immintrin.h>

#include <algorithm>

// In-block accumulation uses four vector lanes; blocks of kBlock elements
// are combined pairwise, mirroring the scalar backend's block structure.

namespace dro::kern::avx2 {

namespace {

constexpr std::size_t kBlock = 1024;

inline double hadd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_block(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    acc2 = _mm256_add_pd(acc2, _mm256_loadu_pd(x + i + 8));
    acc3 = _mm256_add_pd(acc3, _mm256_loadu_pd(x + i + 12));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hadd(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_block(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hadd(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double hinge_sum_block(const double* x, std::size_t n, double t) {
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vt);
    acc = _mm256_add_pd(acc, _mm256_max_pd(d, zero));
  }
  double s = hadd(acc);
  for (; i < n; ++i) s += std::max(0.0, x[i] - t);
  return s;
}

double hinge_dot_block(const double* w, const double* x, std::size_t n, double t) {
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_max_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vt), zero);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), d, acc);
  }
  double s = hadd(acc);
  for (; i < n; ++i) s += w[i] * std::max(0.0, x[i] - t);
  return s;
}

template <typename BlockFn>
double reduce_pairwise(const double* x, std::size_t n, BlockFn block) {
  if (n <= kBlock) return block(x, n);
  const std::size_t half = n / 2;
  return reduce_pairwise(x, half, block) + reduce_pairwise(x + half, n - half, block);
}

double dot_pairwise(const double* x, const double* y, std::size_t n) {
  if (n <= kBlock) return dot_block(x, y, n);
  const std::size_t half = n / 2;
  return dot_pairwise(x, y, half) + dot_pairwise(x + half, y + half, n - half);
}

double hinge_dot_pairwise(const double* w, const double* x, std::size_t n, double t) {
  if (n <= kBlock) return hinge_dot_block(w, x, n, t);
  const std::size_t half = n / 2;
  return hinge_dot_pairwise(w, x, half, t) +
         hinge_dot_pairwise(w + half, x + half, n - half, t);
}

}  // namespace

double sum(std::span<const double> x) {
  return reduce_pairwise(x.data(), x.size(),
                         [](const double* p, std::size_t n) { return sum_block(p, n); });
}

double dot(std::span<const double> x, std::span<const double> y) {
  return dot_pairwise(x.data(), y.data(), x.size());
}

double hinge_sum(std::span<const double> x, double threshold) {
  return reduce_pairwise(x.data(), x.size(), [threshold](const double* p, std::size_t n) {
    return hinge_sum_block(p, n, threshold);
  });
}

double hinge_dot(std::span<const double> w, std::span<const double> x, double threshold) {
  return hinge_dot_pairwise(w.data(), x.data(), x.size(), threshold);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  const std::size_t n = x.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i),
                                      _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(y.data() + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void blend(std::span<double> x, std::span<const double> y, double t) {
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  const std::size_t n = x.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), xv);
    _mm256_storeu_pd(x.data() + i, _mm256_fmadd_pd(vt, d, xv));
  }
  for (; i < n; ++i) x[i] += t * (y[i] - x[i]);
}

void scale(std::span<double> x, double alpha) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  const std::size_t n = x.size();
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void clamp(std::span<const double> p, std::span<const double> lo,
           std::span<const double> hi, std::span<double> out) {
  std::size_t i = 0;
  const std::size_t n = p.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_max_pd(_mm256_loadu_pd(p.data() + i),
                                    _mm256_loadu_pd(lo.data() + i));
    _mm256_storeu_pd(out.data() + i, _mm256_min_pd(v, _mm256_loadu_pd(hi.data() + i)));
  }
  for (; i < n; ++i) out[i] = std::min(std::max(p[i], lo[i]), hi[i]);
}

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r)
    y[r] = dot_pairwise(w.data() + r * cols, x.data(), cols);
}

void matvec_t(std::span<const double> w, std::size_t rows, std::size_t cols,
              std::span<const double> x, std::span<double> y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double xr = x[r];
    const double* wr = w.data() + r * cols;
    const __m256d vx = _mm256_set1_pd(xr);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d acc = _mm256_fmadd_pd(vx, _mm256_loadu_pd(wr + c),
                                          _mm256_loadu_pd(y.data() + c));
      _mm256_storeu_pd(y.data() + c, acc);
    }
    for (; c < cols; ++c) y[c] += xr * wr[c];
  }
}

}  // namespace dro::kern::avx2
