// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "acrom/kernels.hpp"

#include <immintrin.h>

#include <cassert>

namespace acrom::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const double* px = x.data();
  const double* py = y.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i + 4), _mm256_loadu_pd(py + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += px[i] * py[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(a, _mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i));
    _mm256_storeu_pd(py + i, r);
  }
  for (; i < n; ++i) py[i] += alpha * px[i];
}

void weighted_slice_sum(std::span<const double> weights,
                        std::span<const double> slices,
                        std::span<double> out) {
  const std::size_t len = out.size();
  assert(slices.size() == weights.size() * len);
  double* po = out.data();
  const std::size_t nk = weights.size();
  std::size_t i = 0;
  // Register-block the output: each 16-wide stripe stays in registers
  // while all slices are streamed through it.
  for (; i + 16 <= len; i += 16) {
    __m256d o0 = _mm256_setzero_pd(), o1 = _mm256_setzero_pd();
    __m256d o2 = _mm256_setzero_pd(), o3 = _mm256_setzero_pd();
    for (std::size_t k = 0; k < nk; ++k) {
      const __m256d w = _mm256_set1_pd(weights[k]);
      const double* s = slices.data() + k * len + i;
      o0 = _mm256_fmadd_pd(w, _mm256_loadu_pd(s), o0);
      o1 = _mm256_fmadd_pd(w, _mm256_loadu_pd(s + 4), o1);
      o2 = _mm256_fmadd_pd(w, _mm256_loadu_pd(s + 8), o2);
      o3 = _mm256_fmadd_pd(w, _mm256_loadu_pd(s + 12), o3);
    }
    _mm256_storeu_pd(po + i, o0);
    _mm256_storeu_pd(po + i + 4, o1);
    _mm256_storeu_pd(po + i + 8, o2);
    _mm256_storeu_pd(po + i + 12, o3);
  }
  for (; i + 4 <= len; i += 4) {
    __m256d o = _mm256_setzero_pd();
    for (std::size_t k = 0; k < nk; ++k)
      o = _mm256_fmadd_pd(_mm256_set1_pd(weights[k]),
                          _mm256_loadu_pd(slices.data() + k * len + i), o);
    _mm256_storeu_pd(po + i, o);
  }
  for (; i < len; ++i) {
    double o = 0.0;
    for (std::size_t k = 0; k < nk; ++k) o += weights[k] * slices[k * len + i];
    po[i] = o;
  }
}

}  // namespace acrom::kernels::avx2
