#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spdelab/specfun.hpp"
#include "spdelab/spectral.hpp"
#include "test_util.hpp"

using namespace spdelab;

namespace {

SpectralDensity make(Axis axis, Field field, const ModelParams& p, double t = 1.0) {
  SpectralDensity sd;
  sd.axis = axis;
  sd.field = field;
  sd.params = p;
  sd.t_fixed = t;
  return sd;
}

}  // namespace

TEST_CASE("LKS temporal variogram matches the closed form") {
  // ϑ = 0, ε = 1, d = 1: (8/π)(l/8)^{3/4} Γ(1/4)/3.
  const auto sd = make(Axis::Temporal, Field::Base, ModelParams::lks(1.0, 0.0, 1));
  for (double l : {1e-4, 1e-2, 1.0}) {
    const double want = 8.0 / std::numbers::pi * std::pow(l / 8.0, 0.75) * std::tgamma(0.25) / 3.0;
    CAPTURE(l);
    CHECK(rel_err(temporal_variogram(sd, l), want) < 1e-9);
  }
  const auto D = density_function(sd);
  CHECK(D(-1.3) == D(1.3));
}

TEST_CASE("pure power-law temporal densities give the fBm variogram") {
  for (double beta : {0.25, 0.5}) {
    const auto sd = make(Axis::Temporal, Field::Base, ModelParams::tf(beta, 1));
    const double H = temporal_hurst(sd);
    const double C = eval_sd(sd, 1.0);
    for (double l : {1e-3, 0.1, 2.0}) {
      const double want = 2.0 * C / std::numbers::pi * std::pow(l, 2 * H) * std::tgamma(1 - 2 * H) *
                          std::cos(std::numbers::pi * H) / (2 * H);
      CHECK(rel_err(temporal_variogram(sd, l), want) < 1e-8);
    }
  }
}

TEST_CASE("gradient density is freq^2 times the base density") {
  // Gradient densities exist in d = 1 only.
  const ModelParams ps[] = {ModelParams::lks(1.0, 0.0, 1), ModelParams::lks(2.0, 1.0, 1), ModelParams::tf(0.25, 1),
                            ModelParams::tf(0.5, 1)};
  for (const auto& p : ps) {
    const auto base = make(Axis::Spatial, Field::Base, p), grad = make(Axis::Spatial, Field::Gradient, p);
    for (double xi : {0.01, 0.7, 3.0, 50.0}) CHECK(eval_sd(grad, xi) == xi * xi * eval_sd(base, xi));
  }
}

TEST_CASE("densities are positive and eventually decreasing on a log grid") {
  const ModelParams ps[] = {ModelParams::lks(1.0, 0.0, 3), ModelParams::lks(1.0, 1.0, 1), ModelParams::tf(0.125, 2),
                            ModelParams::tf(0.5, 1)};
  for (const auto& p : ps) {
    for (Axis a : {Axis::Temporal, Axis::Spatial}) {
      const auto sd = make(a, Field::Base, p);
      double prev = INFINITY;
      for (int i = 0; i <= 40; ++i) {
        const double f = std::pow(10.0, 1.0 + 0.1 * i);  // past every critical point
        const double v = eval_sd(sd, f);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("variograms are even in the lag") {
  const auto t = make(Axis::Temporal, Field::Base, ModelParams::lks(1.0, 0.0, 2));
  CHECK(temporal_variogram(t, 0.3) == temporal_variogram(t, -0.3));
  const auto s = make(Axis::Spatial, Field::Base, ModelParams::tf(0.25, 1));
  CHECK(spatial_variogram(s, 0.3) == spatial_variogram(s, -0.3));
}

TEST_CASE("spatial variogram tends to twice the variance") {
  const auto s = make(Axis::Spatial, Field::Base, ModelParams::lks(1.0, 0.0, 1));
  CHECK(rel_err(spatial_variogram(s, 200.0), 2.0 * spatial_variance(s)) < 1e-3);
}

TEST_CASE("tail fits recover the LKS exponents") {
  for (int d = 1; d <= 3; ++d) {
    const auto tsd = make(Axis::Temporal, Field::Base, ModelParams::lks(1.0, 0.0, d));
    CHECK(std::fabs(fit_asymptote(tsd).fitted_exponent + (2.0 - d / 4.0)) < 0.02);
    const auto ssd = make(Axis::Spatial, Field::Base, ModelParams::lks(1.0, 0.0, d));
    CHECK(std::fabs(fit_asymptote(ssd).fitted_exponent + 4.0) < 0.02);
  }
}

TEST_CASE("fractional spatial tail: constant and criticality") {
  for (double beta : {0.125, 0.25}) {
    const auto sd = make(Axis::Spatial, Field::Base, ModelParams::tf(beta, 1));
    const auto r = fit_asymptote(sd, {}, LogPowerMode::Include);
    CHECK(std::fabs(r.fitted_log_power) < 0.15);
    const double xi = 1e4;
    CHECK(rel_err(eval_sd(sd, xi) * std::pow(xi, 4.0), tf_spatial_tail_constant(beta, 1.0, 1)) < 0.02);
  }
  const auto crit = make(Axis::Spatial, Field::Base, ModelParams::tf(0.5, 1));
  CHECK(fit_asymptote(crit).fitted_log_power > 0.85);
}

TEST_CASE("invalid inputs") {
  const auto t = make(Axis::Temporal, Field::Base, ModelParams::lks(1.0, 0.0, 1));
  CHECK_THROWS_AS(eval_sd(t, 0.0), DomainError);
  CHECK_THROWS_AS(spatial_variogram(t, 0.1), DomainError);
  CHECK_THROWS_AS(fit_asymptote(t, {1.0, 1e3, 40}), DomainError);
  auto g = make(Axis::Spatial, Field::Gradient, ModelParams::lks(1.0, 0.0, 2));
  CHECK_THROWS_AS(eval_sd(g, 1.0), DomainError);
}
