#include "spdelab/sampler.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fftw_lock.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/simd.hpp"
#include "spdelab/specfun.hpp"

namespace spdelab {

namespace {
constexpr double kPi = std::numbers::pi;

quad::Options line_opts() {
  quad::Options o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-10;
  o.max_intervals = 4000;
  return o;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace

std::string method_name(SampleMethod m) { return m == SampleMethod::Cholesky ? "cholesky" : "spectral"; }

std::vector<double> UniformGrid::coords() const {
  std::vector<double> x(points);
  for (std::size_t i = 0; i < points; ++i) x[i] = start + spacing * static_cast<double>(i);
  return x;
}

SamplePathSet sample_cholesky(const CovMatrix& m, std::size_t replicas, std::uint64_t seed,
                              const std::string& params) {
  if (replicas < 1) throw DomainError("sample_cholesky: replicas must be >= 1");
  const Eigen::Index n = m.entries.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(m.jittered());
  if (llt.info() != Eigen::Success)
    throw RangeError("sample_cholesky: Cholesky factorisation failed (jitter " + fmt(m.jitter) + ")");
  const Eigen::MatrixXd L = llt.matrixL();

  SamplePathSet out;
  out.grid = m.points;
  out.replicas = replicas;
  out.values.assign(replicas * static_cast<std::size_t>(n), 0.0);
  out.seed = seed;
  out.method = SampleMethod::Cholesky;
  out.params = params;
  out.diagnostics = {{"jitter", m.jitter}};
  parallel_for(replicas, [&](std::size_t r) {
    NormalStream z(seed, r, StreamRole::Path);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = z.normal();
    Eigen::Map<Eigen::VectorXd>(out.row(r), n).noalias() = L.triangularView<Eigen::Lower>() * v;
  });
  return out;
}

SamplePathSet sample_brownian(std::size_t n, double T, std::size_t replicas, std::uint64_t seed) {
  if (n < 1 || !(T > 0.0) || replicas < 1) throw DomainError("sample_brownian: need n >= 1, T > 0, replicas >= 1");
  SamplePathSet out;
  out.grid = UniformGrid{0.0, T / static_cast<double>(n), n + 1}.coords();
  out.replicas = replicas;
  out.values.assign(replicas * (n + 1), 0.0);
  out.seed = seed;
  out.method = SampleMethod::Cholesky;
  out.params = "brownian motion";
  const double sd = std::sqrt(T / static_cast<double>(n));
  parallel_for(replicas, [&](std::size_t r) {
    NormalStream z(seed, r, StreamRole::Path);
    double* x = out.row(r);
    x[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) x[i] = x[i - 1] + sd * z.normal();
  });
  return out;
}

double line_density(const SpectralDensity& sd, double xi) {
  if (sd.axis != Axis::Spatial) throw DomainError("line_density: spatial density required");
  const int d = sd.params.dim;
  if (d == 1) return eval_sd(sd, std::fabs(xi));
  if (sd.field == Field::Gradient) throw DomainError("line_density: gradient fields are one-dimensional");
  const double x2 = xi * xi;
  auto f = [&](double rho) {
    const double w = d == 2 ? 2.0 : 2.0 * kPi * rho;
    return w * eval_sd(sd, std::sqrt(x2 + rho * rho));
  };
  const auto r = quad::integrate_to_inf(f, 0.0, line_opts(), {0.5, 1.0, 2.0, 4.0, 8.0, 16.0});
  quad::require(r, "line_density");
  return r.value;
}

SamplePathSet sample_spectral_stationary(const SpectralDensity& sd, const UniformGrid& grid, std::size_t replicas,
                                         std::uint64_t seed, const StationaryOptions& opt) {
  sd.validate();
  if (sd.axis != Axis::Spatial) throw DomainError("sample_spectral_stationary: spatial density required");
  if (grid.points < 2 || !(grid.spacing > 0.0) || replicas < 1 || opt.oversample < 1)
    throw DomainError("sample_spectral_stationary: invalid grid, replica count or oversampling");

  // Nyquist precondition: the density must have fallen below ratio·peak.
  const double nyquist = kPi / grid.spacing;
  {
    double peak = line_density(sd, 0.0);
    std::vector<std::pair<double, double>> scan;
    for (int k = 0; k <= 240; ++k) {
      const double xi = std::pow(10.0, -4.0 + 0.05 * k);
      const double v = line_density(sd, xi);
      scan.emplace_back(xi, v);
      peak = std::max(peak, v);
    }
    double cutoff = 0.0;
    for (const auto& [xi, v] : scan)
      if (v >= opt.decay_ratio * peak) cutoff = xi;
    if (cutoff > nyquist)
      throw DomainError("sample_spectral_stationary: Nyquist frequency " + fmt(nyquist) +
                        " is below the cutoff " + fmt(cutoff) + " where the density falls to " +
                        fmt(opt.decay_ratio) + " of its peak; use spacing <= " + fmt(kPi / cutoff));
  }

  std::size_t N = static_cast<std::size_t>(opt.oversample) * grid.points;
  N += N & 1;
  const std::size_t half = N / 2;
  const double dxi = 2.0 * kPi / (static_cast<double>(N) * grid.spacing);

  // Grid values of the continuous field carry the density folded onto
  // [-π/dx, π/dx]: images m·2π/dx for |m| ≤ M, the rest by its integral.
  const double ws = 2.0 * kPi / grid.spacing;
  const int M = opt.fold_images;
  double fold_tail = 0.0;
  if (M >= 0) {
    quad::Options o = line_opts();
    const auto r = quad::integrate_log_tail([&](double u) { return line_density(sd, u); }, (M + 0.5) * ws, o);
    quad::require(r, "sample_spectral_stationary: folded tail");
    fold_tail = 2.0 * r.value / ws;
  }
  auto folded = [&](double xi) {
    if (M < 0) return line_density(sd, xi);
    double v = fold_tail;
    for (int m = -M; m <= M; ++m) v += line_density(sd, std::fabs(xi + m * ws));
    return v;
  };

  std::vector<double> sigma(half + 1);
  parallel_for(half + 1, [&](std::size_t j) {
    const double s = folded(dxi * static_cast<double>(j));
    const double mass = (j == 0 || j == half) ? s * dxi : 2.0 * s * dxi;
    sigma[j] = std::sqrt(mass);
  });
  double band = 0.0;
  for (double s : sigma) band += s * s;

  SamplePathSet out;
  out.grid = grid.coords();
  out.replicas = replicas;
  out.values.assign(replicas * grid.points, 0.0);
  out.seed = seed;
  out.method = SampleMethod::Spectral;
  out.params = sd.describe();
  out.diagnostics = {{"fft_length", static_cast<double>(N)}, {"band_variance", band}};

  fftw_complex* probe_in = fftw_alloc_complex(half + 1);
  double* probe_out = fftw_alloc_real(N);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(N), probe_in, probe_out, FFTW_ESTIMATE);
  }
  fftw_free(probe_in);
  fftw_free(probe_out);

  try {
    parallel_for(replicas, [&](std::size_t r) {
      fftw_complex* in = fftw_alloc_complex(half + 1);
      double* res = fftw_alloc_real(N);
      NormalStream z(seed, r, StreamRole::Path);
      for (std::size_t j = 0; j <= half; ++j) {
        const double a = z.normal(), b = z.normal();
        if (j == 0 || j == half) {
          in[j][0] = sigma[j] * a;
          in[j][1] = 0.0;
        } else {
          in[j][0] = 0.5 * sigma[j] * a;
          in[j][1] = -0.5 * sigma[j] * b;
        }
      }
      fftw_execute_dft_c2r(plan, in, res);
      std::copy(res, res + grid.points, out.row(r));
      fftw_free(in);
      fftw_free(res);
    });
  } catch (...) {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
    throw;
  }
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

SamplePathSet sample_spectral_stat_increments(const SpectralDensity& sd, const UniformGrid& grid,
                                              std::size_t replicas, std::uint64_t seed,
                                              const IncrementOptions& opt) {
  sd.validate();
  if (sd.axis != Axis::Temporal) throw DomainError("sample_spectral_stat_increments: temporal density required");
  if (grid.points < 2 || !(grid.spacing > 0.0) || grid.start < 0.0 || replicas < 1 || opt.bins < 1 ||
      opt.reseed_every < 1)
    throw DomainError("sample_spectral_stat_increments: invalid grid, replica count or bin count");
  const double span = grid.span() + grid.start;
  const double tmin = opt.tau_min > 0.0 ? opt.tau_min : 1.0 / (100.0 * span);
  const double tmax = opt.tau_max > 0.0 ? opt.tau_max : 100.0 / grid.spacing;
  if (tmin > 1.0 / (10.0 * span) || tmax < 10.0 / grid.spacing || !(tmax > tmin))
    throw DomainError("sample_spectral_stat_increments: frequency range [" + fmt(tmin) + ", " + fmt(tmax) +
                      "] must cover [" + fmt(1.0 / (10.0 * span)) + ", " + fmt(10.0 / grid.spacing) + "]");

  const std::size_t K = opt.bins;
  const auto dens = density_function(sd);
  const double ratio = std::log(tmax / tmin) / static_cast<double>(K);
  std::vector<double> amp(K), tau(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double lo = tmin * std::exp(ratio * static_cast<double>(k));
    const double hi = tmin * std::exp(ratio * static_cast<double>(k + 1));
    tau[k] = std::sqrt(lo * hi);
    amp[k] = std::sqrt(dens(tau[k]) * (hi - lo) / kPi);
  }

  double nugget_var = 0.0;
  if (opt.nugget) {
    quad::Options o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-10;
    o.max_intervals = 4000;
    const auto r = quad::integrate_log_tail(dens, tmax, o);
    quad::require(r, "sample_spectral_stat_increments: remainder mass");
    nugget_var = r.value / kPi;  // half of (2/π)∫_{τmax}^∞ Δ, per grid point
  }

  const std::size_t n = grid.points;
  std::vector<double> wc(K), ws(K);
  for (std::size_t k = 0; k < K; ++k) {
    wc[k] = std::cos(tau[k] * grid.spacing);
    ws[k] = std::sin(tau[k] * grid.spacing);
  }

  SamplePathSet out;
  out.grid = grid.coords();
  out.replicas = replicas;
  out.values.assign(replicas * n, 0.0);
  out.seed = seed;
  out.method = SampleMethod::Spectral;
  out.params = sd.describe();
  out.diagnostics = {{"tau_min", tmin},
                     {"tau_max", tmax},
                     {"bins", static_cast<double>(K)},
                     {"nugget_variance", nugget_var}};

  const auto& kern = simd::active();
  constexpr std::size_t kRows = 8;
  const std::size_t batches = (replicas + kRows - 1) / kRows;
  parallel_for(batches, [&](std::size_t b) {
    const std::size_t r0 = b * kRows;
    const std::size_t rows = std::min(kRows, replicas - r0);
    std::vector<double> A(rows * K), B(rows * K);
    for (std::size_t q = 0; q < rows; ++q) {
      NormalStream z(seed, r0 + q, StreamRole::Path);
      for (std::size_t k = 0; k < K; ++k) {
        A[q * K + k] = amp[k] * z.normal();
        B[q * K + k] = amp[k] * z.normal();
      }
    }
    std::vector<double> c(K, 1.0), s(K, 0.0);
    std::vector<double> offset(rows);
    kern.harmonic_block(K, rows, 1, c.data(), s.data(), c.data(), s.data(), A.data(), B.data(), offset.data(), 1);

    for (std::size_t i0 = 0; i0 < n; i0 += opt.reseed_every) {
      const double t0 = grid.start + grid.spacing * static_cast<double>(i0);
      for (std::size_t k = 0; k < K; ++k) {
        c[k] = std::cos(t0 * tau[k]);
        s[k] = std::sin(t0 * tau[k]);
      }
      const std::size_t steps = std::min(opt.reseed_every, n - i0);
      kern.harmonic_block(K, rows, steps, c.data(), s.data(), wc.data(), ws.data(), A.data(), B.data(),
                          out.row(r0) + i0, n);
    }

    for (std::size_t q = 0; q < rows; ++q) {
      double* x = out.row(r0 + q);
      for (std::size_t i = 0; i < n; ++i) x[i] -= offset[q];
      if (nugget_var > 0.0) {
        NormalStream z(seed, r0 + q, StreamRole::Nugget);
        const double sdn = std::sqrt(nugget_var);
        const double at0 = sdn * z.normal();
        for (std::size_t i = 0; i < n; ++i) {
          const double ti = grid.start + grid.spacing * static_cast<double>(i);
          x[i] += (ti == 0.0 ? at0 : sdn * z.normal()) - at0;
        }
      }
    }
  });
  return out;
}

}  // namespace spdelab
