#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "spdelab/simd.hpp"

using namespace spdelab::simd;

namespace {

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
  const Kernels* v = avx2_kernels();
  if (!v) {
    MESSAGE("CPU lacks AVX2/FMA; equivalence not exercised");
    return;
  }
  const Kernels& s = scalar_kernels();
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  for (std::size_t K : {1u, 3u, 4u, 7u, 64u, 1027u}) {
    const std::size_t rows = 3, steps = 37;
    std::vector<double> c(K), sn(K), wc(K), ws(K), A(rows * K), B(rows * K);
    for (std::size_t k = 0; k < K; ++k) {
      const double a = ang(gen), w = 1e-3 * ang(gen);
      c[k] = std::cos(a), sn[k] = std::sin(a), wc[k] = std::cos(w), ws[k] = std::sin(w);
    }
    for (auto& x : A) x = n01(gen);
    for (auto& x : B) x = n01(gen);
    auto c1 = c, s1 = sn, c2 = c, s2 = sn;
    std::vector<double> o1(rows * steps), o2(rows * steps);
    s.harmonic_block(K, rows, steps, c1.data(), s1.data(), wc.data(), ws.data(), A.data(), B.data(), o1.data(),
                     steps);
    v->harmonic_block(K, rows, steps, c2.data(), s2.data(), wc.data(), ws.data(), A.data(), B.data(), o2.data(),
                      steps);
    CAPTURE(K);
    CHECK(bits_equal(o1, o2));
    CHECK(bits_equal(c1, c2));
    CHECK(bits_equal(s1, s2));
  }
  for (std::size_t n : {0u, 1u, 5u, 8u, 1000u, 4099u}) {
    std::vector<double> x(n);
    for (auto& e : x) e = n01(gen);
    CHECK(s.max_abs(x.data(), n) == v->max_abs(x.data(), n));
    for (std::size_t lag : {1u, 3u, 17u}) {
      if (lag >= n) continue;
      double m1, q1, m2, q2;
      s.increment_stats(x.data(), n, lag, &m1, &q1);
      v->increment_stats(x.data(), n, lag, &m2, &q2);
      CHECK(std::memcmp(&m1, &m2, sizeof m1) == 0);
      CHECK(std::memcmp(&q1, &q2, sizeof q1) == 0);
    }
  }
}

TEST_CASE("forcing the kernel table") {
  force(&scalar_kernels());
  CHECK(std::string(active().name) == scalar_kernels().name);
  force(nullptr);
  CHECK(!active_name().empty());
}
