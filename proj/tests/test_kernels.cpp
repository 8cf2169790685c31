#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spdelab/kernels.hpp"
#include "spdelab/specfun.hpp"
#include "test_util.hpp"

using namespace spdelab;

TEST_CASE("LKS kernel against independent radial quadrature") {
  struct Ref {
    int d;
    double eps, theta, t, r, value;
  };
  // Arbitrary-precision quadrature of the radial inverse transform.
  const Ref refs[] = {{1, 8, 0, 1, 0.0, 0.28851686930823484},   {1, 1, 1, 0.5, 0.7, 0.38663404780683593},
                      {2, 8, 0, 1, 0.5, 0.068071068918336203},  {2, 1, 1, 1, 1.3, 0.083353255360077253},
                      {3, 8, 0, 1, 0.5, 0.015047780379789615},  {3, 2, 1, 0.3, 2.0, -0.004706008646886612}};
  for (const auto& r : refs) {
    CAPTURE(r.d);
    CAPTURE(r.r);
    const auto p = ModelParams::lks(r.eps, r.theta, r.d);
    CHECK(std::fabs(lks_kernel(p, r.t, r.r) - r.value) < 1e-8 * std::fabs(r.value) + 1e-12);
  }
  // d = 1, r = 0, ε = 8: Γ(5/4)/π.
  CHECK(rel_err(lks_kernel(ModelParams::lks(8, 0, 1), 1.0, 0.0), std::tgamma(1.25) / std::numbers::pi) < 1e-10);
}

TEST_CASE("LKS transform closed form") {
  const auto p = ModelParams::lks(2.0, 1.0, 2);
  for (double xi : {0.0, 0.5, 1.414, 3.0}) {
    const double q = xi * xi - 2.0;
    const double want = std::exp(-2.0 * 0.7 / 8.0 * q * q) / (2.0 * std::numbers::pi);
    CHECK(rel_err(lks_kernel_ft(p, 0.7, xi), want) < 1e-14);
  }
}

TEST_CASE("beta = 1/2 transform matches the BTBM closed form") {
  for (int d = 1; d <= 3; ++d) {
    const auto p = ModelParams::tf(0.5, d);
    for (double t : {0.01, 0.3, 5.0}) {
      for (double xi : {0.0, 0.2, 1.0, 4.0, 9.0}) {
        CAPTURE(d);
        CAPTURE(t);
        CAPTURE(xi);
        const double a = tf_kernel_ft(p, t, xi), b = btbm_ft(t, xi, d);
        CHECK(std::fabs(a - b) <= 1e-8 * std::fabs(b) + 1e-300);
      }
    }
  }
}

TEST_CASE("transforms decrease in t at fixed nonzero frequency") {
  const auto lks = ModelParams::lks(1.0, 0.0, 2);
  const auto tf = ModelParams::tf(0.25, 2);
  for (double xi : {0.3, 1.0, 2.5}) {
    double prev_l = INFINITY, prev_t = INFINITY;
    for (double t = 0.05; t < 5.0; t *= 1.7) {
      const double l = lks_kernel_ft(lks, t, xi), f = tf_kernel_ft(tf, t, xi);
      CHECK(l <= prev_l);
      CHECK(f <= prev_t);
      prev_l = l;
      prev_t = f;
    }
  }
}

// Kernels are radial, so evenness holds by construction; r < 0 is rejected.
TEST_CASE("theta = 0 LKS kernel peaks at the origin") {
  const auto p = ModelParams::lks(1.0, 0.0, 1);
  const double k0 = lks_kernel(p, 1.0, 0.0);
  for (double r : {0.1, 0.5, 1.0, 2.0, 4.0, 9.0, 25.0}) CHECK(lks_kernel(p, 1.0, r) < k0);
  CHECK_THROWS_AS(lks_kernel(p, 1.0, -0.5), DomainError);
}

TEST_CASE("beta = 1/2 kernel: inverse transform vs subordination") {
  for (int d = 1; d <= 2; ++d) {
    const auto p = ModelParams::tf(0.5, d);
    for (double r : {0.3, 0.7, 2.0}) {
      CAPTURE(d);
      CAPTURE(r);
      CHECK(rel_err(tf_kernel(p, 1.0, r), btbm_kernel_subordination(1.0, r, d)) < 1e-4);
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(ModelParams::lks(-1.0, 0.0, 1).validate());
  CHECK_THROWS(ModelParams::tf(0.7, 1).validate());
  CHECK_THROWS(ModelParams::tf(0.25, 4).validate());
  CHECK_NOTHROW(ModelParams::tf(0.5, 3).validate());
}

TEST_CASE("initial-data convolution preserves a constant field") {
  // The transform of the kernel at ξ = 0 is (2π)^{-d/2}·1, so the total mass
  // of the kernel is 1 and constants are fixed points (ϑ = 0).
  const int n = 32;
  std::vector<double> u0(n, 2.5);
  const auto out = apply_initial_data(ModelParams::lks(1.0, 0.0, 1), 0.2, u0, n, 0.25);
  for (double v : out) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}
