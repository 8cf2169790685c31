#include <doctest.h>

#include <cmath>
#include <vector>

#include "spdelab/specfun.hpp"
#include "test_util.hpp"

using namespace spdelab;

TEST_CASE("Mittag-Leffler against high-precision reference values") {
  // 20-digit values from an arbitrary-precision series.
  struct Ref {
    double beta, x, value;
  };
  const Ref refs[] = {{0.3, -2.0, 0.29023222616787535504},
                      {0.5, -3.0, 0.17900115118138995042},
                      {0.8, -1.5, 0.26363903543962692829},
                      {0.1, -0.5, 0.65432446028800192845}};
  for (const auto& r : refs) {
    CAPTURE(r.beta);
    CAPTURE(r.x);
    CHECK(rel_err(mittag_leffler(r.beta, r.x), r.value) < 1e-12);
  }
}

TEST_CASE("E_1/2(-x) equals the scaled complementary error function") {
  for (double x : {1e-6, 0.3, 2.0, 7.5, 40.0, 300.0, 1e5}) {
    CAPTURE(x);
    CHECK(rel_err(mittag_leffler(0.5, -x), erfcx(x)) < 1e-12);
  }
}

TEST_CASE("erfcx and Mills ratio") {
  CHECK(rel_err(erfcx(0.5), std::exp(0.25) * std::erfc(0.5)) < 1e-14);
  CHECK(rel_err(erfcx(30.0), 0.018795888861416751) < 1e-12);
  // (1 - Φ(x))/φ(x) = sqrt(pi/2) erfcx(x/sqrt 2)
  for (double x : {0.1, 1.0, 12.0})
    CHECK(rel_err(mills_ratio(x), std::sqrt(std::acos(-1.0) / 2.0) * erfcx(x / std::sqrt(2.0))) < 1e-13);
}

TEST_CASE("unclamped values stay inside the two-sided bracket") {
  MLEvalPolicy raw;
  raw.clamp_to_bounds = false;
  int outside = 0, total = 0;
  for (double beta : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    for (int i = 0; i < 60; ++i) {
      const double x = std::pow(10.0, -6.0 + 12.0 * i / 59.0);
      const double e = mittag_leffler(beta, -x, raw);
      const auto b = ml_bounds(beta, x);
      ++total;
      if (!(e >= b.lower && e <= b.upper)) ++outside;
    }
  }
  CHECK(total == 300);
  CHECK(outside == 0);
}

TEST_CASE("large-argument behaviour x E_beta(-x) Gamma(1-beta) -> 1") {
  for (double beta : {0.1, 0.25, 0.5}) {
    for (double x : {1e4, 1e6}) {
      CAPTURE(beta);
      CHECK(std::fabs(mittag_leffler(beta, -x) * x * gamma_fn(1.0 - beta) - 1.0) < 0.01);
    }
  }
}

TEST_CASE("gamma helpers") {
  CHECK(rel_err(gamma_fn(0.25), 3.6256099082219083119) < 1e-14);
  CHECK(reciprocal_gamma(0.0) == 0.0);
  CHECK(reciprocal_gamma(-3.0) == 0.0);
  CHECK(rel_err(reciprocal_gamma(4.0), 1.0 / 6.0) < 1e-15);
}

TEST_CASE("hypergeometric Gauss summation at z = 1") {
  const double a = 0.3, b = 0.4, c = 1.9;
  const double want = gamma_fn(c) * gamma_fn(c - a - b) / (gamma_fn(c - a) * gamma_fn(c - b));
  CHECK(rel_err(hyp2F1(a, b, c, 1.0), want) < 1e-12);
  // 2F1(1,1;2;z) = -log(1-z)/z
  CHECK(rel_err(hyp2F1(1.0, 1.0, 2.0, 0.5), -std::log(0.5) / 0.5) < 1e-13);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(mittag_leffler(0.0, -1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler(1.5, -1.0), DomainError);
  CHECK_THROWS_AS(ml_bounds(0.5, -1.0), DomainError);
}
