// Reference kernels. Compiled with -ffp-contract=off: every fused operation
// below is an explicit std::fma, matching the vector code one-to-one.
#include <cmath>

#include "spdelab/simd.hpp"

namespace spdelab::simd {

namespace {

void harmonic_block(std::size_t K, std::size_t rows, std::size_t steps, double* c, double* s, const double* wc,
                    const double* ws, const double* A, const double* B, double* out, std::size_t out_stride) {
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* a = A + r * K;
      const double* b = B + r * K;
      double acc[4] = {0.0, 0.0, 0.0, 0.0};
      for (std::size_t k = 0; k < K; ++k) {
        double& l = acc[k & 3];
        l = std::fma(c[k], a[k], l);
        l = std::fma(s[k], b[k], l);
      }
      out[r * out_stride + i] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    for (std::size_t k = 0; k < K; ++k) {
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
  double mx = 0.0;
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t m = lag < n ? n - lag : 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double d = x[i + lag] - x[i];
    mx = std::fmax(mx, std::fabs(d));
    acc[i & 3] = std::fma(d, d, acc[i & 3]);
  }
  *max_abs = mx;
  *sum_sq = (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double max_abs(const double* x, std::size_t n) {
  double mx = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx = std::fmax(mx, std::fabs(x[i]));
  return mx;
}

const Kernels kScalar{"scalar", harmonic_block, increment_stats, max_abs};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace spdelab::simd
