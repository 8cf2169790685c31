// AVX2+FMA kernels; lane j of every accumulator holds the elements with
// index ≡ j (mod 4), exactly as in the scalar reference.
#include <immintrin.h>

#include <cmath>

#include "spdelab/simd.hpp"

namespace spdelab::simd {

namespace {

inline void spill(__m256d v, double* l) { _mm256_storeu_pd(l, v); }

void harmonic_block(std::size_t K, std::size_t rows, std::size_t steps, double* c, double* s, const double* wc,
                    const double* ws, const double* A, const double* B, double* out, std::size_t out_stride) {
  const std::size_t K4 = K & ~std::size_t{3};
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* a = A + r * K;
      const double* b = B + r * K;
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t k = 0; k < K4; k += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(c + k), _mm256_loadu_pd(a + k), acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(s + k), _mm256_loadu_pd(b + k), acc);
      }
      alignas(32) double l[4];
      spill(acc, l);
      for (std::size_t k = K4; k < K; ++k) {
        double& lane = l[k & 3];
        lane = std::fma(c[k], a[k], lane);
        lane = std::fma(s[k], b[k], lane);
      }
      out[r * out_stride + i] = (l[0] + l[1]) + (l[2] + l[3]);
    }
    for (std::size_t k = 0; k < K4; k += 4) {
      const __m256d cv = _mm256_loadu_pd(c + k), sv = _mm256_loadu_pd(s + k);
      const __m256d wcv = _mm256_loadu_pd(wc + k), wsv = _mm256_loadu_pd(ws + k);
      const __m256d t1 = _mm256_mul_pd(sv, wsv);
      const __m256d t2 = _mm256_mul_pd(cv, wsv);
      _mm256_storeu_pd(c + k, _mm256_fmsub_pd(cv, wcv, t1));
      _mm256_storeu_pd(s + k, _mm256_fmadd_pd(sv, wcv, t2));
    }
    for (std::size_t k = K4; k < K; ++k) {
      const double t1 = s[k] * ws[k];
      const double t2 = c[k] * ws[k];
      const double cn = std::fma(c[k], wc[k], -t1);
      const double sn = std::fma(s[k], wc[k], t2);
      c[k] = cn;
      s[k] = sn;
    }
  }
}

void increment_stats(const double* x, std::size_t n, std::size_t lag, double* max_abs, double* sum_sq) {
  const std::size_t m = lag < n ? n - lag : 0;
  const std::size_t m4 = m & ~std::size_t{3};
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d mx = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < m4; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i + lag), _mm256_loadu_pd(x + i));
    mx = _mm256_max_pd(mx, _mm256_andnot_pd(sign, d));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  alignas(32) double l[4], ml[4];
  spill(acc, l);
  spill(mx, ml);
  double best = std::fmax(std::fmax(ml[0], ml[1]), std::fmax(ml[2], ml[3]));
  for (std::size_t i = m4; i < m; ++i) {
    const double d = x[i + lag] - x[i];
    best = std::fmax(best, std::fabs(d));
    l[i & 3] = std::fma(d, d, l[i & 3]);
  }
  *max_abs = best;
  *sum_sq = (l[0] + l[1]) + (l[2] + l[3]);
}

double max_abs(const double* x, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d mx = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) mx = _mm256_max_pd(mx, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double ml[4];
  spill(mx, ml);
  double best = std::fmax(std::fmax(ml[0], ml[1]), std::fmax(ml[2], ml[3]));
  for (std::size_t i = n4; i < n; ++i) best = std::fmax(best, std::fabs(x[i]));
  return best;
}

const Kernels kAvx2{"avx2", harmonic_block, increment_stats, max_abs};

}  // namespace

namespace detail {
const Kernels& avx2_table() { return kAvx2; }
}  // namespace detail

}  // namespace spdelab::simd
