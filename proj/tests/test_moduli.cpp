#include <doctest.h>

#include <cmath>

#include "spdelab/moduli.hpp"
#include "spdelab/specfun.hpp"
#include "test_util.hpp"

using namespace spdelab;

TEST_CASE("Hölder fit is exact on fBm second moments") {
  for (double H0 : {0.125, 0.375, 0.5, 0.8}) {
    std::vector<double> lags, m2;
    for (int i = 0; i < 16; ++i) {
      lags.push_back(std::pow(10.0, -5.0 + 0.25 * i));
      m2.push_back(2.7 * std::pow(lags.back(), 2 * H0));
    }
    const auto f = holder_fit(lags, m2);
    CHECK(std::fabs(f.H - H0) < 1e-3);
    CHECK(f.stderr_H < 1e-10);
  }
}

TEST_CASE("log-factor detection on synthetic data") {
  for (double p : {0.0, 0.5, 1.0, 2.0}) {
    std::vector<double> lags, m2;
    for (int i = 0; i < 25; ++i) {
      const double r = std::pow(10.0, -7.0 + 0.25 * i);
      lags.push_back(r);
      m2.push_back(0.3 * r * std::pow(std::log(1.0 / r), p));
    }
    const auto f = log_factor_detect(lags, m2, 0.5);
    CAPTURE(p);
    CHECK(std::fabs(f.p - p) < 0.05);
  }
}

TEST_CASE("regression preconditions") {
  std::vector<double> lags{1e-3, 1e-2}, m2{1.0, 2.0};
  CHECK_THROWS_AS(holder_fit(lags, m2), DomainError);
  std::vector<double> short_l, short_m;
  for (int i = 0; i < 10; ++i) short_l.push_back(1e-3 * (1 + i)), short_m.push_back(1.0 + i);
  CHECK_THROWS_AS(log_factor_detect(short_l, short_m, 0.5), DomainError);
}

TEST_CASE("delta grids") {
  const auto d = default_deltas(1.0 / 4096.0);
  CHECK(d.size() == 8);
  CHECK(d.back() >= 10.0 / 4096.0);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] == d[i - 1] / 2.0);
  const auto g = geometric_deltas(0.5, 4, 3.0);
  CHECK(g.back() == doctest::Approx(0.5 / 27.0));
}

TEST_CASE("Brownian modulus statistics: plateau, misspecification, refinement") {
  const auto bm = sample_brownian(1 << 12, 1.0, 64, 31);
  const auto deltas = default_deltas(1.0 / 4096.0);
  // Lévy normaliser √(2 h log(1/h)): H = 1/2, log power 1/2.
  const auto ok = uniform_modulus_stat(bm, {0.5, 0.5, 0.0, ModulusMode::Uniform}, 0.0, 1.0, deltas);
  CHECK(ok.plateau_cv < 0.2);
  CHECK(ok.plateau_estimate > 0.0);
  for (double dH : {-0.1, 0.1}) {
    const auto bad = uniform_modulus_stat(bm, {0.5 + dH, 0.5, 0.0, ModulusMode::Uniform}, 0.0, 1.0, deltas);
    std::vector<double> tail(bad.statistic.end() - 5, bad.statistic.end());
    CAPTURE(dH);
    CHECK(is_monotone(tail));
  }
  // Halving the spacing barely moves the plateau.
  const auto fine = sample_brownian(1 << 13, 1.0, 64, 31);
  const auto ref = uniform_modulus_stat(fine, {0.5, 0.5, 0.0, ModulusMode::Uniform}, 0.0, 1.0, deltas);
  CHECK(rel_err(ref.plateau_estimate, ok.plateau_estimate) < 0.1);
  // Under the right normaliser the fitted index is near 1/2; without the log
  // factor the growing √log drags it below 1/2.
  CHECK(std::fabs(ok.fitted_H - 0.5) < 0.1);
  const auto raw = uniform_modulus_stat(bm, {0.5, 0.0, 0.0, ModulusMode::Uniform}, 0.0, 1.0, deltas);
  CHECK(raw.fitted_H < 0.45);
}

TEST_CASE("local and Chung statistics on Brownian paths") {
  const auto bm = sample_brownian(1 << 12, 0.25, 128, 41);
  const auto deltas = geometric_deltas(1.0 / 16.0, 6);
  const auto loc = local_modulus_stat(bm, {0.5, 0.0, 0.5, ModulusMode::Local}, 0.125, deltas);
  for (double v : loc.statistic) CHECK(v > 0.0);
  CHECK(loc.plateau_cv < 0.2);
  const auto ch = chung_stat(bm, 0.5, deltas);
  for (double v : ch.statistic) CHECK(v > 0.0);
  CHECK_THROWS_AS(local_modulus_stat(bm, {0.5, 0.0, 0.5, ModulusMode::Local}, 0.01, deltas), DomainError);
}

TEST_CASE("statistic preconditions") {
  const auto bm = sample_brownian(256, 1.0, 4, 1);
  // δ_min must be at least 10 spacings.
  CHECK_THROWS_AS(uniform_modulus_stat(bm, {}, 0.0, 1.0, geometric_deltas(0.01, 3)), DomainError);
  CHECK_THROWS_AS(uniform_modulus_stat(bm, {}, 0.0, 1.0, {0.2, 0.3}), DomainError);
  CHECK_THROWS_AS((ModulusSpec{0.5, 0.0, -0.5, ModulusMode::Uniform}.validate()), DomainError);
  CHECK_NOTHROW((ModulusSpec{0.5, 0.0, -0.5, ModulusMode::Chung}.validate()));
  CHECK(parse_mode("chung") == ModulusMode::Chung);
  CHECK_THROWS(parse_mode("other"));
}
