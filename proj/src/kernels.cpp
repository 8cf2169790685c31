#include "spdelab/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fftw_lock.hpp"
#include "spdelab/mltable.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/radial.hpp"
#include "spdelab/specfun.hpp"

namespace spdelab {

namespace {
constexpr double kPi = std::numbers::pi;

double norm_factor(int d) { return std::pow(2.0 * kPi, -0.5 * d); }

void check_t(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(who) + ": t must be positive");
}
}  // namespace

void ModelParams::validate() const {
  if (dim < 1 || dim > 3) throw DomainError("ModelParams: dim must be 1, 2 or 3");
  if (family == Family::LKS) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("ModelParams: epsilon must be positive");
    if (!std::isfinite(theta)) throw DomainError("ModelParams: theta must be finite");
  } else {
    if (!(beta > 0.0 && beta <= 0.5)) throw DomainError("ModelParams: beta must lie in (0, 1/2]");
  }
}

ModelParams ModelParams::lks(double eps, double theta, int dim) {
  ModelParams p;
  p.family = Family::LKS;
  p.epsilon = eps;
  p.theta = theta;
  p.dim = dim;
  p.validate();
  return p;
}

ModelParams ModelParams::tf(double beta, int dim) {
  ModelParams p;
  p.family = Family::TF;
  p.beta = beta;
  p.dim = dim;
  p.validate();
  return p;
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (family == Family::LKS) os << "LKS(eps=" << epsilon << ",theta=" << theta << ",d=" << dim << ")";
  else os << "TF(beta=" << beta << ",d=" << dim << ")";
  return os.str();
}

double lks_kernel_ft(const ModelParams& p, double t, double xi) {
  check_t(t, "lks_kernel_ft");
  const double q = xi * xi - 2.0 * p.theta;
  return norm_factor(p.dim) * std::exp(-p.epsilon * t / 8.0 * q * q);
}

double tf_kernel_ft(const ModelParams& p, double t, double xi) {
  check_t(t, "tf_kernel_ft");
  p.validate();
  return norm_factor(p.dim) * mittag_leffler(p.beta, -xi * xi * std::pow(t, p.beta) / 2.0);
}

double btbm_ft(double t, double xi, int d, BtbmConvention c) {
  check_t(t, "btbm_ft");
  const double x2 = xi * xi;
  const double z = c == BtbmConvention::Scaled ? std::sqrt(t) * x2 / 2.0 : std::sqrt(2.0 * t) * x2 / 4.0;
  return norm_factor(d) * erfcx(z);
}

double lks_kernel(const ModelParams& p, double t, double r) {
  check_t(t, "lks_kernel");
  if (r < 0.0) throw DomainError("lks_kernel: r must be nonnegative");
  const double a = p.epsilon * t / 8.0;
  const double th2 = 2.0 * p.theta;
  RadialSpec spec;
  // e^{-a q^2} < 1e-310 beyond q^2 = 714/a
  spec.rho_max = std::sqrt(std::max(0.0, th2) + std::sqrt(714.0 / a));
  if (th2 > 0.0) spec.breaks.push_back(std::sqrt(th2));
  spec.breaks.push_back(std::pow(a, -0.25));
  // Past a few decay lengths the value is a cancellation residue; the
  // absolute floor sits above the Kronrod round-off estimate 4 eps ∫|g w|.
  spec.opt.abs_tol = 1e-12;
  spec.opt.rel_tol = 1e-12;
  spec.opt.max_intervals = 200000;
  auto g = [&](double rho) {
    const double q = rho * rho - th2;
    return std::exp(-a * q * q);
  };
  auto res = radial_fourier_integral(g, p.dim, r, spec);
  quad::require(res, "lks_kernel");
  return std::pow(2.0 * kPi, -p.dim) * res.value;
}

double tf_kernel(const ModelParams& p, double t, double r) {
  check_t(t, "tf_kernel");
  p.validate();
  if (r < 0.0) throw DomainError("tf_kernel: r must be nonnegative");
  if (r == 0.0 && p.dim >= 2) throw RangeError("tf_kernel: kernel is unbounded at r = 0 for d >= 2");
  auto ml = MLTable::get(p.beta);
  const double c = std::pow(t, p.beta) / 2.0;
  RadialSpec spec;
  spec.breaks = {1.0 / std::sqrt(c)};
  if (r > 0.0) spec.breaks.push_back(4.0 / r);
  spec.opt.abs_tol = 1e-14;
  spec.opt.rel_tol = 1e-11;
  spec.opt.max_intervals = 20000;
  auto g = [&](double rho) { return (*ml)(c * rho * rho); };
  auto res = radial_fourier_integral(g, p.dim, r, spec);
  quad::require(res, "tf_kernel");
  return std::pow(2.0 * kPi, -p.dim) * res.value;
}

double btbm_kernel_subordination(double t, double r, int d) {
  check_t(t, "btbm_kernel_subordination");
  if (r == 0.0 && d >= 2) throw RangeError("btbm_kernel_subordination: unbounded at r = 0 for d >= 2");
  // s = u^2: ∫ (2π u^2)^{-d/2} e^{-r^2/(2u^2)} e^{-u^4/(4t)} / sqrt(π t) 2u du
  const double pref = 2.0 * std::pow(2.0 * kPi, -0.5 * d) / std::sqrt(kPi * t);
  auto f = [&](double u) {
    if (u == 0.0) return d == 1 && r == 0.0 ? pref : 0.0;
    const double e = -r * r / (2.0 * u * u) - u * u * u * u / (4.0 * t);
    return pref * std::pow(u, 1.0 - d) * std::exp(e);
  };
  std::vector<double> br{std::pow(t, 0.25)};
  if (r > 0.0) br.push_back(r / std::sqrt(std::max(1.0, static_cast<double>(d))));
  quad::Options opt;
  opt.abs_tol = 1e-16;
  opt.rel_tol = 1e-12;
  auto res = quad::integrate_to_inf(f, 0.0, opt, br);
  quad::require(res, "btbm_kernel_subordination");
  return res.value;
}

std::vector<double> apply_initial_data(const ModelParams& p, double t, const std::vector<double>& u0, int n,
                                       double dx, std::vector<std::string>* diagnostics) {
  check_t(t, "apply_initial_data");
  p.validate();
  const int d = p.dim;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
  if (u0.size() != total) throw DomainError("apply_initial_data: field size does not match n^d");
  if (!(dx > 0.0) || n < 2) throw DomainError("apply_initial_data: invalid grid");

  // transform multiplier (2π)^{d/2} K̂(|ξ|)
  auto multiplier = [&](double xi) {
    return p.family == Family::LKS ? lks_kernel_ft(p, t, xi) / norm_factor(d)
                                   : tf_kernel_ft(p, t, xi) / norm_factor(d);
  };
  const double nyquist = kPi / dx;
  if (multiplier(nyquist) > 1e-6 && diagnostics) {
    std::ostringstream os;
    os << "grid too coarse: kernel transform at the Nyquist frequency " << nyquist << " is "
       << multiplier(nyquist) << " (> 1e-6); the kernel is under-resolved";
    diagnostics->push_back(os.str());
  }

  std::vector<int> dims(d, n);
  const int nc = n / 2 + 1;
  std::size_t ctotal = static_cast<std::size_t>(nc);
  for (int i = 0; i + 1 < d; ++i) ctotal *= static_cast<std::size_t>(n);
  std::vector<double> in(u0), out(total);
  auto* spec = fftw_alloc_complex(ctotal);
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c(d, dims.data(), in.data(), spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r(d, dims.data(), spec, out.data(), FFTW_ESTIMATE);
  }
  std::copy(u0.begin(), u0.end(), in.begin());
  fftw_execute(fwd);

  const double dk = 2.0 * kPi / (n * dx);
  auto freq = [&](int k) { return (k <= n / 2 ? k : k - n) * dk; };
  // row-major (i0, i1, k) with the halved axis last
  std::size_t idx = 0;
  const int n0 = d >= 2 ? n : 1, n1 = d >= 3 ? n : 1;
  for (int i0 = 0; i0 < n0; ++i0)
    for (int i1 = 0; i1 < n1; ++i1)
      for (int k = 0; k < nc; ++k, ++idx) {
        double xi2 = freq(k) * freq(k);
        if (d >= 2) xi2 += freq(i0) * freq(i0);
        if (d >= 3) xi2 += freq(i1) * freq(i1);
        const double m = multiplier(std::sqrt(xi2));
        spec[idx][0] *= m;
        spec[idx][1] *= m;
      }
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(spec);
  const double scale = 1.0 / static_cast<double>(total);
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace spdelab
