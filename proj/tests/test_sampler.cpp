#include <doctest.h>

#include <cmath>
#include <cstring>
#include <map>

#include "spdelab/moduli.hpp"
#include "spdelab/specfun.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/sampler.hpp"
#include "test_util.hpp"

using namespace spdelab;

namespace {

SpectralDensity spatial(const ModelParams& p, Field f = Field::Base) {
  SpectralDensity sd;
  sd.axis = Axis::Spatial;
  sd.field = f;
  sd.params = p;
  return sd;
}

SpectralDensity temporal(const ModelParams& p, Field f = Field::Base) {
  SpectralDensity sd;
  sd.axis = Axis::Temporal;
  sd.field = f;
  sd.params = p;
  return sd;
}

bool same_bits(const SamplePathSet& a, const SamplePathSet& b) {
  return a.values.size() == b.values.size() &&
         std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0;
}

// Max-abs error of the empirical covariance of a Cholesky sample.
double cov_error(const CovMatrix& m, std::size_t n, std::uint64_t seed) {
  const auto s = sample_cholesky(m, n, seed);
  const std::size_t p = s.points();
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) acc += s.row(r)[i] * s.row(r)[j];
      worst = std::max(worst, std::fabs(acc / n - m.entries(i, j)));
    }
  return worst;
}

}  // namespace

TEST_CASE("Cholesky sampling of white noise: moments and Gaussianity") {
  CovMatrix m;
  m.points = {1, 2, 3, 4, 5, 6, 7, 8};
  m.entries = Eigen::MatrixXd::Identity(8, 8);
  const std::size_t N = 20000;
  const auto s = sample_cholesky(m, N, 7);
  for (std::size_t j = 0; j < 8; ++j) {
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    for (std::size_t r = 0; r < N; ++r) {
      const double x = s.row(r)[j];
      m1 += x, m2 += x * x, m3 += x * x * x, m4 += x * x * x * x;
    }
    m1 /= N, m2 /= N, m3 /= N, m4 /= N;
    CHECK(std::fabs(m1) < 5.0 / std::sqrt(N));
    CHECK(std::fabs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / N));
    // Five standard errors of the sample skewness and excess kurtosis.
    CHECK(std::fabs(m3 / std::pow(m2, 1.5)) < 5.0 * std::sqrt(6.0 / N));
    CHECK(std::fabs(m4 / (m2 * m2) - 3.0) < 5.0 * std::sqrt(24.0 / N));
  }
}

TEST_CASE("Cholesky covariance error shrinks like 1/sqrt(N)") {
  std::vector<double> pts;
  for (int i = 1; i <= 6; ++i) pts.push_back(i / 6.0);
  auto m = build_cov_matrix([](double t, double s) { return std::min(t, s); }, pts);
  apply_jitter(m);
  double e1 = 0.0, e2 = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    e1 += cov_error(m, 2000, seed);
    e2 += cov_error(m, 8000, seed + 100);
  }
  const double ratio = e1 / e2;  // √(8000/2000) = 2 expected
  CAPTURE(ratio);
  CHECK(ratio > 1.2);
  CHECK(ratio < 3.5);
}

TEST_CASE("Brownian paths: start at zero, increment variance dt") {
  const auto b = sample_brownian(1024, 1.0, 200, 11);
  CHECK(b.points() == 1025);
  double acc = 0.0;
  for (std::size_t r = 0; r < b.replicas; ++r) {
    CHECK(b.row(r)[0] == 0.0);
    for (std::size_t i = 1; i < b.points(); ++i) acc += std::pow(b.row(r)[i] - b.row(r)[i - 1], 2);
  }
  CHECK(rel_err(acc / (200.0 * 1024.0), 1.0 / 1024.0) < 0.02);
}

TEST_CASE("stationary synthesis: lag-0 variance equals the spectral mass") {
  const auto sd = spatial(ModelParams::lks(1.0, 0.0, 1));
  const UniformGrid g{0.0, 0.05, 1024};
  const auto s = sample_spectral_stationary(sd, g, 256, 3);
  double var = 0.0;
  for (std::size_t r = 0; r < s.replicas; ++r)
    for (std::size_t i = 0; i < s.points(); ++i) var += s.row(r)[i] * s.row(r)[i];
  var /= static_cast<double>(s.replicas * s.points());
  CHECK(rel_err(var, spatial_variance(sd)) < 0.05);
}

TEST_CASE("stationary synthesis reproduces the spatial variogram") {
  const auto sd = spatial(ModelParams::lks(1.0, 0.0, 1));
  const UniformGrid g{0.0, 0.05, 1024};
  const auto s = sample_spectral_stationary(sd, g, 256, 5);
  // Lags in [4 spacing, span/8].
  const auto ev = empirical_variogram(s, log_lag_steps(4, 127, 8));
  for (std::size_t k = 0; k < ev.lags.size(); ++k) {
    CAPTURE(ev.lags[k]);
    CHECK(rel_err(ev.second_moment[k], spatial_variogram(sd, ev.lags[k])) < 0.05);
  }
  // Differentiable field: exponent close to 1 at small lags.
  std::vector<std::size_t> small;
  for (std::size_t i = 1; i <= 10; ++i) small.push_back(i);
  const auto ev2 = empirical_variogram(s, small);
  const double H = holder_fit(ev2.lags, ev2.second_moment).H;
  CAPTURE(H);
  CHECK(H > 0.9);
  CHECK(H < 1.02);
}

TEST_CASE("gradient field below criticality has exponent 1/2") {
  const auto sd = spatial(ModelParams::tf(0.25, 1), Field::Gradient);
  const UniformGrid g{0.0, 1.0 / 2048.0, 2049};
  const auto s = sample_spectral_stationary(sd, g, 64, 9);
  const auto ev = empirical_variogram(s, log_lag_steps(1, 32, 12));
  const double H = holder_fit(ev.lags, ev.second_moment).H;
  CAPTURE(H);
  CHECK(std::fabs(H - 0.5) < 0.03);
}

TEST_CASE("increment synthesis: X(0) = 0 and the temporal variogram") {
  const auto sd = temporal(ModelParams::lks(1.0, 0.0, 1));
  const UniformGrid g{0.0, 1.0 / 1024.0, 1025};
  const auto s = sample_spectral_stat_increments(sd, g, 128, 13);
  for (std::size_t r = 0; r < s.replicas; ++r) CHECK(s.row(r)[0] == 0.0);
  const auto ev = empirical_variogram(s, log_lag_steps(4, 32, 6));
  for (std::size_t k = 0; k < ev.lags.size(); ++k) {
    CAPTURE(ev.lags[k]);
    CHECK(rel_err(ev.second_moment[k], temporal_variogram(sd, ev.lags[k])) < 0.05);
  }
}

TEST_CASE("spectral and Cholesky paths agree on the variogram") {
  const auto sd = spatial(ModelParams::lks(1.0, 0.0, 1));
  const UniformGrid g{0.0, 0.0625, 128};
  std::map<long, double> cache;
  const double var = spatial_variance(sd);
  auto cov = [&](double x, double y) {
    const long k = std::lround(std::fabs(x - y) / g.spacing);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    const double c = var - 0.5 * spatial_variogram(sd, k * g.spacing);
    cache.emplace(k, c);
    return c;
  };
  auto m = build_cov_matrix(cov, g.coords());
  apply_jitter(m);
  const auto a = sample_cholesky(m, 512, 17);
  const auto b = sample_spectral_stationary(sd, g, 512, 19);
  const std::vector<std::size_t> steps{1, 2, 4, 8};
  const auto va = empirical_variogram(a, steps), vb = empirical_variogram(b, steps);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    CAPTURE(steps[k]);
    CHECK(rel_err(va.second_moment[k], vb.second_moment[k]) < 0.07);
  }
}

TEST_CASE("sampling is deterministic across runs and thread counts") {
  const auto sd = temporal(ModelParams::tf(0.25, 1));
  const UniformGrid g{0.0, 1.0 / 256.0, 257};
  const int saved = thread_count();
  set_thread_count(1);
  const auto a = sample_spectral_stat_increments(sd, g, 8, 21);
  set_thread_count(3);
  const auto b = sample_spectral_stat_increments(sd, g, 8, 21);
  set_thread_count(saved);
  const auto c = sample_spectral_stat_increments(sd, g, 8, 22);
  CHECK(same_bits(a, b));
  CHECK_FALSE(same_bits(a, c));
  const auto f1 = sample_spectral_stationary(spatial(ModelParams::lks(1.0, 0.0, 1)), {0.0, 0.05, 100}, 4, 1);
  const auto f2 = sample_spectral_stationary(spatial(ModelParams::lks(1.0, 0.0, 1)), {0.0, 0.05, 100}, 4, 1);
  CHECK(same_bits(f1, f2));
}

TEST_CASE("sampler preconditions") {
  // Nyquist π/0.5 lies well inside the ξ^{-4} tail.
  CHECK_THROWS_AS(sample_spectral_stationary(spatial(ModelParams::lks(1.0, 0.0, 1)), {0.0, 0.5, 64}, 2, 1),
                  DomainError);
  IncrementOptions o;
  o.tau_min = 1.0;  // must be at most 1/(10 span)
  CHECK_THROWS_AS(
      sample_spectral_stat_increments(temporal(ModelParams::lks(1.0, 0.0, 1)), {0.0, 0.01, 101}, 2, 1, o),
      DomainError);
  CHECK_THROWS_AS(sample_spectral_stationary(temporal(ModelParams::lks(1.0, 0.0, 1)), {0.0, 0.05, 64}, 2, 1),
                  DomainError);
}
