#include "spdelab/covariance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spdelab/mltable.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/radial.hpp"
#include "spdelab/rng.hpp"
#include "spdelab/specfun.hpp"

namespace spdelab {

namespace {
constexpr double kPi = std::numbers::pi;

quad::Options opts(double rel) {
  quad::Options o;
  o.abs_tol = 1e-300;
  o.rel_tol = rel;
  o.max_intervals = 20000;
  return o;
}

void check_times(double& t, double& s, const char* who) {
  if (!(t >= 0.0) || !(s >= 0.0) || !std::isfinite(t) || !std::isfinite(s))
    throw DomainError(std::string(who) + ": times must be finite and nonnegative");
  if (s > t) std::swap(t, s);
}

// F_d(κ) = ∫_0^∞ u^{d/2-1} E(-u) E(-κu) du = 2 ∫_0^∞ v^{d-1} E(-v²) E(-κv²) dv
double tf_F(const MLTable& ml, int d, double kappa) {
  auto g = [&](double v) {
    const double v2 = v * v;
    return std::pow(v, d - 1) * ml(v2) * ml(kappa * v2);
  };
  const auto o = opts(1e-11);
  auto head = quad::integrate(g, {0.0, 0.5, 1.0}, o);
  auto tail = quad::integrate_log_tail(g, 1.0, o);
  quad::require(head, "tf_temporal_cov inner");
  quad::require(tail, "tf_temporal_cov inner tail");
  return 2.0 * (head.value + tail.value);
}
}  // namespace

void BifBMParams::validate() const {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("BifBMParams: H must lie in (0,1)");
  if (!(K > 0.0 && K <= 1.0)) throw DomainError("BifBMParams: K must lie in (0,1]");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("BifBMParams: scale must be positive");
}

double bifbm_cov(const BifBMParams& p, double t, double s) {
  if (t < 0.0 || s < 0.0) throw DomainError("bifbm_cov: times must be nonnegative");
  const double h2 = 2.0 * p.H;
  const double a = std::pow(std::pow(t, h2) + std::pow(s, h2), p.K);
  const double b = std::pow(std::fabs(t - s), h2 * p.K);
  return p.scale * p.scale * std::exp2(-p.K) * (a - b);
}

double quartic_gauss_integral(int d) {
  auto g = [&](double r) { return std::pow(r, d - 1) * std::exp(-r * r * r * r); };
  auto res = quad::integrate(g, {0.0, 1.0, 2.0, 3.0, 6.0}, opts(1e-14));
  quad::require(res, "quartic_gauss_integral");
  return unit_sphere_area(d) * res.value;
}

double lks_bifbm_constant(double eps, int d) {
  if (!(eps > 0.0)) throw DomainError("lks_bifbm_constant: eps must be positive");
  if (d < 1 || d > 3) throw DomainError("lks_bifbm_constant: d must be 1, 2 or 3");
  const double A = std::pow(2.0 * kPi, -d) * std::pow(8.0 / eps, d / 4.0) * quartic_gauss_integral(d) / (2.0 - d / 2.0);
  return std::sqrt(A) * std::exp2((4.0 - d) / 8.0);
}

double lks_temporal_cov(const ModelParams& p, double t, double s) {
  p.validate();
  if (p.family != Family::LKS) throw DomainError("lks_temporal_cov: needs LKS parameters");
  check_times(t, s, "lks_temporal_cov");
  if (s == 0.0) return 0.0;
  const int d = p.dim;
  const double c = p.epsilon / 8.0;
  const double th2 = 2.0 * p.theta;
  // ∫_0^s e^{-c(t+s-2r)q} dr = e^{-c(t-s)q} (1 - e^{-2csq}) / (2cq), q = (ρ²-2ϑ)²
  auto g = [&](double rho) {
    const double u = rho * rho - th2;
    const double q = u * u;
    const double inner = q == 0.0 ? s : std::exp(-c * (t - s) * q) * -std::expm1(-2.0 * c * s * q) / (2.0 * c * q);
    return std::pow(rho, d - 1) * inner;
  };
  std::vector<double> br;
  for (double scale : {t + s, t - s, s}) {
    if (!(scale > 0.0)) continue;
    const double w = std::sqrt(1.0 / (c * scale));  // q = 1/(c·scale)
    for (double r2 : {th2 - w, th2 + w})
      if (r2 > 0.0) br.push_back(std::sqrt(r2));
  }
  if (th2 > 0.0) br.push_back(std::sqrt(th2));
  const double top = br.empty() ? 1.0 : *std::max_element(br.begin(), br.end());
  br.push_back(4.0 * top);
  br.push_back(16.0 * top);
  auto res = quad::integrate_to_inf(g, 0.0, opts(1e-12), br);
  quad::require(res, "lks_temporal_cov");
  return std::pow(2.0 * kPi, -d) * unit_sphere_area(d) * res.value;
}

double tf_temporal_cov(const ModelParams& p, double t, double s) {
  p.validate();
  if (p.family != Family::TF) throw DomainError("tf_temporal_cov: needs TF parameters");
  check_times(t, s, "tf_temporal_cov");
  if (s == 0.0) return 0.0;
  const int d = p.dim;
  const double beta = p.beta;
  auto ml = MLTable::get(beta);
  // r = s - w: a = (t-r)^β/2, κ = ((s-r)/(t-r))^β, integrand a^{-d/2} F_d(κ)
  auto g = [&](double w) {
    if (w == 0.0) return 0.0;
    const double tr = t - s + w;
    const double a = 0.5 * std::pow(tr, beta);
    const double kappa = std::pow(w / tr, beta);
    return std::pow(a, -0.5 * d) * tf_F(*ml, d, kappa);
  };
  std::vector<double> pts{0.0};
  for (int k = 50; k >= 0; --k) pts.push_back(std::ldexp(s, -k));
  auto res = quad::integrate(g, pts, opts(1e-10));
  quad::require(res, "tf_temporal_cov");
  return std::pow(2.0 * kPi, -d) * unit_sphere_area(d) * 0.5 * res.value;
}

double tf_inner_series(double beta, double a, double t, double s, int k_max) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("tf_inner_series: beta must lie in (0,1)");
  if (!(a >= 0.0) || !(s > 0.0) || !(t >= s)) throw DomainError("tf_inner_series: needs a >= 0 and 0 < s <= t");
  if (k_max < 0 || k_max > 200) throw DomainError("tf_inner_series: k_max must lie in [0, 200]");
  const double z = s / t;
  double sum = 0.0, biggest = 0.0;
  int small = 0;
  double last_abs = std::numeric_limits<double>::infinity();
  int growing = 0;
  for (int k = 0; k <= k_max; ++k) {
    double inner = 0.0;
    for (int j = 0; j <= k; ++j) {
      const int m = k - j;
      const double bm = beta * m;
      const double f = hyp2F1(1.0, -beta * j, 2.0 + bm, z);
      inner += std::pow(t, beta * j) * std::pow(s, bm + 1.0) * f * reciprocal_gamma(1.0 + beta * j) *
               reciprocal_gamma(1.0 + bm) / (bm + 1.0);
    }
    const double term = std::pow(-a, k) * inner;
    if (!std::isfinite(term)) throw RangeError("tf_inner_series: term overflow");
    sum += term;
    biggest = std::max(biggest, std::fabs(term));
    const double at = std::fabs(term);
    growing = (k >= 4 && at > last_abs) ? growing + 1 : 0;
    if (growing >= 8) throw RangeError("tf_inner_series: terms are growing, series diverges in double precision");
    last_abs = at;
    if (at <= 1e-17 * std::fabs(sum)) {
      if (++small >= 3) {
        if (biggest > 1e6 * std::fabs(sum))
          throw RangeError("tf_inner_series: cancellation exceeds double precision for this argument");
        return sum;
      }
    } else {
      small = 0;
    }
  }
  throw RangeError("tf_inner_series: not converged within k_max terms");
}

double spatial_cov(const SpectralDensity& sd, double h) {
  if (sd.axis != Axis::Spatial) throw DomainError("spatial_cov: needs a spatial density");
  h = std::fabs(h);
  if (h == 0.0) return spatial_variance(sd);
  auto S = density_function(sd);
  const auto& p = sd.params;
  RadialSpec spec;
  if (p.family == Family::LKS) {
    const double w = std::sqrt(4.0 / (p.epsilon * sd.t_fixed));
    for (double r2 : {2.0 * p.theta - w, 2.0 * p.theta, 2.0 * p.theta + w})
      if (r2 > 0.0) spec.breaks.push_back(std::sqrt(r2));
  } else {
    spec.breaks.push_back(std::sqrt(2.0 / std::pow(sd.t_fixed, p.beta)));
  }
  const double k = *std::max_element(spec.breaks.begin(), spec.breaks.end());
  spec.breaks.push_back(4.0 * k);
  spec.breaks.push_back(16.0 * k);
  spec.opt = opts(1e-12);
  spec.opt.abs_tol = 1e-16;
  auto res = radial_fourier_integral(S, p.dim, h, spec);
  quad::require(res, "spatial_cov");
  return res.value;
}

Eigen::MatrixXd CovMatrix::jittered() const {
  Eigen::MatrixXd a = entries;
  a.diagonal().array() += jitter;
  return a;
}

double CovMatrix::max_diag() const { return entries.size() == 0 ? 0.0 : entries.diagonal().maxCoeff(); }

CovMatrix build_cov_matrix(const CovFn& cov, const std::vector<double>& points) {
  const std::size_t n = points.size();
  CovMatrix m;
  m.points = points;
  m.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = cov(points[i], points[j]);
      m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
  return m;
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void apply_jitter(CovMatrix& m) {
  const double md = m.max_diag();
  if (!(md > 0.0)) throw RangeError("apply_jitter: matrix has no positive diagonal entry");
  for (double f : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    m.jitter = f * md;
    const Eigen::MatrixXd a = m.jittered();
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success && min_eigenvalue(a) >= 0.0) return;
  }
  std::ostringstream os;
  os << "apply_jitter: not positive definite with jitter up to 1e-8 x max diagonal (smallest eigenvalue "
     << min_eigenvalue(m.entries) << ")";
  throw RangeError(os.str());
}

double conditional_variance(const Eigen::MatrixXd& cov, int target, const std::vector<int>& cond) {
  const int n = static_cast<int>(cov.rows());
  if (target < 0 || target >= n) throw DomainError("conditional_variance: target out of range");
  for (int c : cond) {
    if (c < 0 || c >= n) throw DomainError("conditional_variance: conditioning index out of range");
    if (c == target) throw DomainError("conditional_variance: target must not be conditioned on");
  }
  const double v = cov(target, target);
  if (cond.empty()) return v;
  const int m = static_cast<int>(cond.size());
  Eigen::MatrixXd C(m, m);
  Eigen::VectorXd k(m);
  for (int i = 0; i < m; ++i) {
    k(i) = cov(cond[i], target);
    for (int j = 0; j < m; ++j) C(i, j) = cov(cond[i], cond[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success) throw RangeError("conditional_variance: conditioning block is singular");
  const Eigen::VectorXd w = llt.matrixL().solve(k);
  return std::max(0.0, v - w.squaredNorm());
}

double conditional_variance(const CovMatrix& m, int target, const std::vector<int>& cond) {
  return conditional_variance(m.jittered(), target, cond);
}

StationaryCov tabulate_spatial_cov(const SpectralDensity& sd, double r_min, double r_max, int points) {
  if (!(r_min > 0.0 && r_max > r_min) || points < 8) throw DomainError("tabulate_spatial_cov: bad table range");
  std::vector<double> lr(static_cast<std::size_t>(points)), lg(lr.size());
  for (int i = 0; i < points; ++i)
    lr[static_cast<std::size_t>(i)] = std::log(r_min) + (std::log(r_max) - std::log(r_min)) * i / (points - 1);
  parallel_for(lr.size(), [&](std::size_t i) { lg[i] = std::log(spatial_variogram(sd, std::exp(lr[i]))); });
  // Fritsch-Carlson slopes
  const std::size_t n = lr.size();
  std::vector<double> del(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) del[i] = (lg[i + 1] - lg[i]) / (lr[i + 1] - lr[i]);
  m[0] = del[0];
  m[n - 1] = del[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = del[i - 1] * del[i] <= 0.0 ? 0.0 : 0.5 * (del[i - 1] + del[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (del[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / del[i], b = m[i + 1] / del[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m[i] = tau * a * del[i];
      m[i + 1] = tau * b * del[i];
    }
  }
  StationaryCov out;
  out.variance = spatial_variance(sd);
  out.variogram = [lr, lg, m](double r) {
    if (r <= 0.0) return 0.0;
    const double x = std::log(r);
    const std::size_t n = lr.size();
    if (x <= lr[0]) return std::exp(lg[0] + m[0] * (x - lr[0]));
    if (x >= lr[n - 1]) return std::exp(lg[n - 1] + m[n - 1] * (x - lr[n - 1]));
    const double h = lr[1] - lr[0];
    std::size_t i = std::min(n - 2, static_cast<std::size_t>((x - lr[0]) / h));
    const double u = (x - lr[i]) / (lr[i + 1] - lr[i]);
    const double u2 = u * u, u3 = u2 * u;
    const double hi = lr[i + 1] - lr[i];
    const double y = (2 * u3 - 3 * u2 + 1) * lg[i] + (u3 - 2 * u2 + u) * hi * m[i] + (-2 * u3 + 3 * u2) * lg[i + 1] +
                     (u3 - u2) * hi * m[i + 1];
    return std::exp(y);
  };
  return out;
}

double slnd_phi(double r, double exponent, bool phi_log) {
  const double p = std::pow(r, exponent);
  return phi_log ? p * std::log(1.0 / r) : p;
}

SlndReport slnd_check(const StationaryCov& cov, const SlndOptions& o) {
  if (o.dim < 1 || o.dim > 3) throw DomainError("slnd_check: dim must be 1, 2 or 3");
  if (o.n_max < 0 || o.n_max > 8) throw DomainError("slnd_check: n_max must lie in [0, 8]");
  if (o.trials < 1) throw DomainError("slnd_check: trials must be positive");
  if (o.phi_log && o.box * std::sqrt(static_cast<double>(o.dim)) >= 1.0)
    throw DomainError("slnd_check: r log(1/r) needs all distances below 1");
  const int d = o.dim;
  using Pt = std::array<double, 3>;
  auto dist = [d](const Pt& a, const Pt& b) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  };
  auto c_of = [&](double r) { return cov.variance - 0.5 * cov.variogram(r); };

  std::vector<double> ratio(static_cast<std::size_t>(o.trials));
  std::vector<int> nsel(ratio.size());
  parallel_for(ratio.size(), [&](std::size_t trial) {
    NormalStream rng(o.seed, trial, StreamRole::Config);
    const int n = static_cast<int>(rng.uniform() * (o.n_max + 1)) % (o.n_max + 1);
    const bool clustered = trial % 2 == 1;
    const Pt anchor{0.0, 0.0, 0.0};
    std::vector<Pt> pts;  // pts[0] is the target
    Pt x{};
    for (int k = 0; k < d; ++k) x[k] = o.box * (0.1 + 0.8 * rng.uniform());
    pts.push_back(x);
    while (static_cast<int>(pts.size()) < n + 1) {
      Pt y{};
      if (clustered) {
        // log-uniform distance in [min_dist, box/4], random direction
        const double r = o.min_dist * std::pow(0.25 * o.box / o.min_dist, rng.uniform());
        double nn = 0.0;
        Pt dir{};
        for (int k = 0; k < d; ++k) {
          dir[k] = rng.normal();
          nn += dir[k] * dir[k];
        }
        nn = std::sqrt(nn);
        for (int k = 0; k < d; ++k) y[k] = std::clamp(x[k] + r * dir[k] / nn, 0.0, o.box);
      } else {
        for (int k = 0; k < d; ++k) y[k] = o.box * rng.uniform();
      }
      bool ok = dist(y, anchor) >= o.min_dist;
      for (const auto& q : pts) ok = ok && dist(y, q) >= o.min_dist;
      if (ok) pts.push_back(y);
    }
    const int m = static_cast<int>(pts.size());
    Eigen::MatrixXd C(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) C(i, j) = i == j ? cov.variance : c_of(dist(pts[i], pts[j]));
    std::vector<int> cond;
    for (int j = 1; j < m; ++j) cond.push_back(j);
    const double v = conditional_variance(C, 0, cond);
    double mind = dist(x, anchor);
    for (int j = 1; j < m; ++j) mind = std::min(mind, dist(x, pts[j]));
    ratio[trial] = v / slnd_phi(mind, o.exponent, o.phi_log);
    nsel[trial] = n;
  });
  SlndReport rep;
  rep.c_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ratio.size(); ++i)
    if (ratio[i] < rep.c_min) {
      rep.c_min = ratio[i];
      rep.worst_trial = static_cast<int>(i);
      rep.worst_n = nsel[i];
    }
  rep.kappa = cov.variogram(o.box) / (2.0 * slnd_phi(o.box, o.exponent, o.phi_log));
  rep.normalized = rep.c_min / rep.kappa;
  rep.pass = rep.normalized >= 1e-2;
  return rep;
}

namespace {
struct FitData {
  const Eigen::MatrixXd& c;
  const std::vector<double>& g;
  double cnorm2;
};

// squared normalised distance after the closed-form scale; +inf outside the domain
double fit_objective(const FitData& fd, double H, double K, double* scale2) {
  if (!(H > 0.0 && H < 1.0 && K > 0.0 && K <= 1.0)) return std::numeric_limits<double>::infinity();
  const std::size_t n = fd.g.size();
  BifBMParams p{H, K, 1.0};
  Eigen::MatrixXd R(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = bifbm_cov(p, fd.g[i], fd.g[j]);
      R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      R(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  const double rr = R.squaredNorm();
  const double s2 = (fd.c.array() * R.array()).sum() / rr;
  if (scale2) *scale2 = s2;
  return (fd.c - s2 * R).squaredNorm() / fd.cnorm2;
}

struct NMResult {
  double H, K, f;
  bool converged;
};

NMResult nelder_mead(const FitData& fd, double H0, double K0) {
  std::array<std::array<double, 2>, 3> x{{{H0, K0}, {H0 + 0.05, K0}, {H0, K0 - 0.05}}};
  std::array<double, 3> f{};
  for (int i = 0; i < 3; ++i) f[i] = fit_objective(fd, x[i][0], x[i][1], nullptr);
  bool converged = false;
  for (int it = 0; it < 4000; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return f[a] < f[b] || (f[a] == f[b] && a < b); });
    const auto xb = x[o[0]], xm = x[o[1]], xw = x[o[2]];
    const double fb = f[o[0]], fm = f[o[1]], fw = f[o[2]];
    const double size = std::max(std::hypot(xm[0] - xb[0], xm[1] - xb[1]), std::hypot(xw[0] - xb[0], xw[1] - xb[1]));
    if (size < 1e-11 || (std::isfinite(fw) && fw - fb <= 1e-30 + 1e-14 * fb && size < 1e-7)) {
      converged = true;
      x = {xb, xm, xw};
      f = {fb, fm, fw};
      break;
    }
    const std::array<double, 2> cen{0.5 * (xb[0] + xm[0]), 0.5 * (xb[1] + xm[1])};
    auto along = [&](double t) { return std::array<double, 2>{cen[0] + t * (xw[0] - cen[0]), cen[1] + t * (xw[1] - cen[1])}; };
    const auto xr = along(-1.0);
    const double fr = fit_objective(fd, xr[0], xr[1], nullptr);
    std::array<double, 2> xn;
    double fn;
    if (fr < fb) {
      const auto xe = along(-2.0);
      const double fe = fit_objective(fd, xe[0], xe[1], nullptr);
      if (fe < fr) {
        xn = xe;
        fn = fe;
      } else {
        xn = xr;
        fn = fr;
      }
    } else if (fr < fm) {
      xn = xr;
      fn = fr;
    } else {
      const auto xc = fr < fw ? along(-0.5) : along(0.5);
      const double fc = fit_objective(fd, xc[0], xc[1], nullptr);
      if (fc < std::min(fr, fw)) {
        xn = xc;
        fn = fc;
      } else {
        // shrink towards the best vertex
        x = {xb, {0.5 * (xb[0] + xm[0]), 0.5 * (xb[1] + xm[1])}, {0.5 * (xb[0] + xw[0]), 0.5 * (xb[1] + xw[1])}};
        f = {fb, fit_objective(fd, x[1][0], x[1][1], nullptr), fit_objective(fd, x[2][0], x[2][1], nullptr)};
        continue;
      }
    }
    x = {xb, xm, xn};
    f = {fb, fm, fn};
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (f[i] < f[best]) best = i;
  return {x[best][0], x[best][1], f[best], converged};
}
}  // namespace

BifbmFitResult bifbm_fit(const Eigen::MatrixXd& c, const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  if (n < 20) throw DomainError("bifbm_fit: needs at least 20 grid points");
  if (static_cast<std::size_t>(c.rows()) != n || static_cast<std::size_t>(c.cols()) != n)
    throw DomainError("bifbm_fit: matrix does not match grid");
  for (double g : grid)
    if (!(g > 0.0)) throw DomainError("bifbm_fit: grid points must be positive");
  FitData fd{c, grid, c.squaredNorm()};
  if (!(fd.cnorm2 > 0.0)) throw DomainError("bifbm_fit: zero covariance");

  const double Hs[5] = {0.1, 0.3, 0.5, 0.7, 0.9};
  const double Ks[5] = {0.2, 0.4, 0.6, 0.8, 0.95};
  std::vector<NMResult> runs(25);
  parallel_for(runs.size(), [&](std::size_t i) { runs[i] = nelder_mead(fd, Hs[i / 5], Ks[i % 5]); });

  BifbmFitResult out;
  int best = -1;
  for (int i = 0; i < 25; ++i) {
    const auto& r = runs[static_cast<std::size_t>(i)];
    if (r.converged) ++out.converged_starts;
    if (best < 0 || r.f < runs[static_cast<std::size_t>(best)].f) best = i;
  }
  if (out.converged_starts == 0) {
    std::ostringstream os;
    os << "bifbm_fit: no start converged; best objective " << runs[static_cast<std::size_t>(best)].f;
    throw RangeError(os.str());
  }
  const auto& r = runs[static_cast<std::size_t>(best)];
  double s2 = 0.0;
  const double f = fit_objective(fd, r.H, r.K, &s2);
  out.params = {r.H, r.K, std::sqrt(std::max(0.0, s2))};
  out.residual = std::sqrt(f);
  out.best_start = best;
  for (int i = 0; i < 25; ++i) {
    const auto& q = runs[static_cast<std::size_t>(i)];
    std::ostringstream os;
    os.precision(10);
    os << "start " << i << " (H0=" << Hs[i / 5] << ",K0=" << Ks[i % 5] << "): H=" << q.H << " K=" << q.K
       << " residual=" << std::sqrt(q.f) << (q.converged ? "" : " [not converged]");
    out.diagnostics.push_back(os.str());
  }
  return out;
}

BifbmFitResult bifbm_fit(const CovFn& cov, const std::vector<double>& grid) {
  const auto m = build_cov_matrix(cov, grid);
  return bifbm_fit(m.entries, grid);
}

}  // namespace spdelab
