#include <doctest.h>

#include <cmath>

#include "spdelab/covariance.hpp"
#include "test_util.hpp"

using namespace spdelab;

TEST_CASE("bifBM scale constants at epsilon = 1") {
  // Direct quadrature of the time integral, independent of the closed form.
  const double want[] = {0.73758567371222, 0.531125966013598, 0.419034252163688};
  for (int d = 1; d <= 3; ++d) CHECK(rel_err(lks_bifbm_constant(1.0, d), want[d - 1]) < 1e-12);
  // c_d(ε) = c_d(8) (8/ε)^{d/8}
  for (int d = 1; d <= 3; ++d)
    CHECK(rel_err(lks_bifbm_constant(2.0, d), lks_bifbm_constant(8.0, d) * std::pow(4.0, d / 8.0)) < 1e-12);
}

TEST_CASE("theta = 0 LKS covariance is a scaled bifBM covariance") {
  for (int d = 1; d <= 3; ++d) {
    const auto p = ModelParams::lks(1.0, 0.0, d);
    const double c = lks_bifbm_constant(1.0, d);
    const BifBMParams b{0.5, (4.0 - d) / 4.0, c};
    for (double t : {0.1, 0.6, 2.0})
      for (double s : {0.05, 0.6, 1.7}) CHECK(rel_err(lks_temporal_cov(p, t, s), bifbm_cov(b, t, s)) < 1e-6);
  }
}

TEST_CASE("inner Mittag-Leffler series value") {
  CHECK(rel_err(tf_inner_series(0.5, 0.1, 1.0, 0.5), 0.431851587957192) < 1e-12);
}

TEST_CASE("fractional covariance at beta = 1/2, d = 1, against erfcx double quadrature") {
  // Independent values: (1/π) ∫_0^s ∫_0^∞ erfcx(ρ²√(t-r)/2) erfcx(ρ²√(s-r)/2) dρ dr.
  const auto p = ModelParams::tf(0.5, 1);
  CHECK(rel_err(tf_temporal_cov(p, 1.0, 0.5), 0.19445075222505365) < 1e-7);
  CHECK(rel_err(tf_temporal_cov(p, 0.7, 0.7), 0.3137910345659423) < 1e-7);
  CHECK(rel_err(tf_temporal_cov(p, 2.0, 0.3), 0.10471445582688674) < 1e-7);
}

TEST_CASE("fractional covariance self-similarity") {
  const auto p = ModelParams::tf(0.25, 2);
  const double H2 = (2.0 - 0.25 * 2) / 2.0;
  const double base = tf_temporal_cov(p, 0.7, 0.3);
  for (double c : {0.5, 2.0}) CHECK(rel_err(tf_temporal_cov(p, c * 0.7, c * 0.3), std::pow(c, H2) * base) < 1e-5);
}

TEST_CASE("covariance matrices and conditional variances") {
  const std::vector<double> pts{0.25, 0.5, 0.75, 1.0};
  auto m = build_cov_matrix([](double t, double s) { return std::min(t, s); }, pts);
  CHECK(m.entries.isApprox(m.entries.transpose()));
  CHECK(min_eigenvalue(m.entries) > 0.0);
  // Brownian motion: Var(B_1 | B_0.5) = 0.5, Var(B_0.5 | B_0.25, B_0.75) = 0.125.
  CHECK(conditional_variance(m.entries, 3, {1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(conditional_variance(m.entries, 1, {0, 2}) == doctest::Approx(0.125).epsilon(1e-12));
  apply_jitter(m);
  CHECK(m.jitter >= 0.0);
  CHECK(m.jitter <= 1e-10 * m.max_diag());
}

TEST_CASE("bifBM fit recovers exact parameters") {
  const BifBMParams truth{0.4, 0.7, 1.3};
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 20.0);
  const auto r = bifbm_fit([&](double t, double s) { return bifbm_cov(truth, t, s); }, grid);
  CHECK(r.residual < 1e-6);
  CHECK(std::fabs(r.params.H - truth.H) < 1e-3);
  CHECK(std::fabs(r.params.K - truth.K) < 1e-3);
  CHECK(rel_err(r.params.scale, truth.scale) < 1e-3);
}

TEST_CASE("SLND on the LKS field in d = 3, reduced trial count") {
  SpectralDensity sd;
  sd.axis = Axis::Spatial;
  sd.params = ModelParams::lks(1.0, 0.0, 3);
  const auto cov = tabulate_spatial_cov(sd, 1e-5, 1.0);
  SlndOptions o;
  o.dim = 3;
  o.trials = 50;
  const auto r = slnd_check(cov, o);
  CHECK(r.c_min > 0.0);
  CHECK(r.pass);
}

TEST_CASE("covariance preconditions") {
  CHECK_THROWS((BifBMParams{0.5, 1.5, 1.0}.validate()));
  CHECK_THROWS(bifbm_cov({0.5, 1.0, 1.0}, -1.0, 0.5));
  CHECK_THROWS(lks_temporal_cov(ModelParams::lks(1.0, 0.0, 1), -1.0, 0.5));
}
