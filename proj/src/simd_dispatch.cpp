#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "spdelab/simd.hpp"

namespace spdelab::simd {

namespace {
bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels& choose() {
  const char* env = std::getenv("SPDELAB_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return scalar_kernels();
  if (env && std::strcmp(env, "avx2") == 0 && !cpu_has_avx2())
    throw std::runtime_error("SPDELAB_SIMD=avx2 requested but the CPU lacks AVX2/FMA");
  return cpu_has_avx2() ? detail::avx2_table() : scalar_kernels();
}
}  // namespace

const Kernels* avx2_kernels() { return cpu_has_avx2() ? &detail::avx2_table() : nullptr; }

namespace {
std::atomic<const Kernels*>& forced() {
  static std::atomic<const Kernels*> k{nullptr};
  return k;
}
}  // namespace

const Kernels& active() {
  if (const Kernels* f = forced().load()) return *f;
  static const Kernels& k = choose();
  return k;
}

void force(const Kernels* k) { forced().store(k); }

std::string active_name() { return active().name; }

}  // namespace spdelab::simd
