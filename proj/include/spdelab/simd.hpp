// Hot loops with a scalar reference and an AVX2+FMA variant. Both use fused
// multiply-adds and reduce through four accumulators in the same fixed order
// (element i goes to lane i mod 4, lanes combined as (l0+l1)+(l2+l3)), so
// the two variants return identical bits.
#pragma once

#include <cstddef>
#include <string>

namespace spdelab::simd {

struct Kernels {
  const char* name;

  // Harmonic synthesis on `steps` consecutive time points. Frequency k has
  // phasor (c[k], s[k]) that is rotated by (wc[k], ws[k]) after each step.
  // For each row r and step i:
  //   out[r*out_stride + i] = Σ_k c_k A[r*K + k] + s_k B[r*K + k]
  // c and s are advanced in place.
  void (*harmonic_block)(std::size_t K, std::size_t rows, std::size_t steps, double* c, double* s, const double* wc,
                         const double* ws, const double* A, const double* B, double* out, std::size_t out_stride);

  // For a path x[0..n) and lag l: max_i |x[i+l]-x[i]| and Σ_i (x[i+l]-x[i])^2.
  void (*increment_stats)(const double* x, std::size_t n, std::size_t lag, double* max_abs, double* sum_sq);

  // max_i |x_i| over x[0..n); 0 for n = 0.
  double (*max_abs)(const double* x, std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the CPU lacks AVX2 or FMA.
const Kernels* avx2_kernels();

// Chosen once: AVX2 when available unless SPDELAB_SIMD=scalar.
const Kernels& active();
std::string active_name();
// Replace the active table (nullptr restores the default choice). Intended
// for equivalence tests; not synchronised with running kernels.
void force(const Kernels* k);

namespace detail {
const Kernels& avx2_table();  // defined in the AVX2 translation unit
}

}  // namespace spdelab::simd
