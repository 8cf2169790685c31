#include "spdelab/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "spdelab/mltable.hpp"
#include "spdelab/quadrature.hpp"
#include "spdelab/radial.hpp"
#include "spdelab/specfun.hpp"

namespace spdelab {

namespace {
constexpr double kPi = std::numbers::pi;

quad::Options tight() {
  quad::Options o;
  o.abs_tol = 1e-300;
  o.rel_tol = 1e-12;
  o.max_intervals = 20000;
  return o;
}

double two_pi_pow(int d) { return std::pow(2.0 * kPi, -d); }

// 1 - (angular factor) without cancellation at small argument
double one_minus_weight(int d, double x) {
  switch (d) {
    case 1: {
      const double s = std::sin(0.5 * x);
      return 2.0 * s * s;
    }
    case 2: {
      if (std::fabs(x) < 1e-2) {
        const double x2 = x * x;
        return x2 / 4.0 - x2 * x2 / 64.0 + x2 * x2 * x2 / 2304.0;
      }
      return 1.0 - std::cyl_bessel_j(0.0, x);
    }
    default: {
      if (std::fabs(x) < 1e-2) {
        const double x2 = x * x;
        return x2 / 6.0 - x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0;
      }
      return 1.0 - std::sin(x) / x;
    }
  }
}

// Δ(τ) for LKS, direct radial quadrature; extra ρ² for the gradient.
// With ρ² = s x², s = sqrt(8τ/ε), the integrand is O(1) with knees at x² = 2ϑ/s ± 1.
double lks_temporal(const ModelParams& p, bool grad, double tau) {
  const int d = p.dim;
  const double s = std::sqrt(8.0 * tau / p.epsilon);
  const double th = 2.0 * p.theta / s;
  auto g = [&](double x) {
    const double q = x * x - th;
    const double q2 = q * q;
    double num = std::pow(x, d - 1);
    if (grad) num *= x * x;
    return num / (1.0 + q2 * q2);
  };
  double value;
  if (th <= 4.0) {
    std::vector<double> br;
    for (double x2 : {th - 1.0, th, th + 1.0})
      if (x2 > 0.0) br.push_back(std::sqrt(x2));
    auto res = quad::integrate_to_inf(g, 0.0, tight(), br);
    quad::require(res, "eval_sd(LKS temporal)");
    value = res.value;
  } else {
    // narrow ridge at x² = th: below th/2 in x, above it in q = x² - th
    const double xa = std::sqrt(0.5 * th);
    auto lo = quad::integrate(g, 0.0, xa, tight());
    const double pw = 0.5 * d - 1.0 + (grad ? 1.0 : 0.0);
    auto gq = [&](double q) { return 0.5 * std::pow(th + q, pw) / (1.0 + q * q * q * q); };
    std::vector<double> pts{-0.5 * th, -1.0, 0.0, 1.0, 8.0};
    for (double b = -8.0; b > -0.5 * th; b *= 4.0) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    auto mid = quad::integrate(gq, pts, tight());
    auto hi = quad::integrate_to_inf(gq, 8.0, tight());
    quad::require(lo, "eval_sd(LKS temporal)");
    quad::require(mid, "eval_sd(LKS temporal)");
    quad::require(hi, "eval_sd(LKS temporal)");
    value = lo.value + mid.value + hi.value;
  }
  const double scale = std::pow(s, 0.5 * (d + (grad ? 2 : 0))) / (tau * tau);
  return two_pi_pow(d) * unit_sphere_area(d) * scale * value;
}

double tf_temporal_gradient_constant(double beta) {
  const double cb = std::cos(kPi * beta / 2.0);
  auto g = [&](double u) {
    const double u2 = u * u;
    return u2 / (1.0 + u2 * cb + u2 * u2 / 4.0);
  };
  auto res = quad::integrate_to_inf(g, 0.0, tight(), {1.0, 2.0});
  quad::require(res, "tf gradient temporal constant");
  return 2.0 * res.value / (2.0 * kPi);
}

// R_β(U) = ∫_0^1 E_β(-U w^β)^2 dw = (1/β) ∫_0^1 v^{1/β-1} E_β(-U v)^2 dv
double tf_R(const MLTable& ml, double U) {
  if (U == 0.0) return 1.0;
  const double beta = ml.beta();
  const double e = 1.0 / beta - 1.0;
  auto g = [&](double v) {
    if (v == 0.0) return 0.0;
    const double E = ml(U * v);
    return std::pow(v, e) * E * E;
  };
  std::vector<double> pts{0.0};
  for (double b = 0.1 / U; b < 1.0; b *= 10.0)
    if (b > 0.0) pts.push_back(b);
  pts.push_back(1.0);
  auto res = quad::integrate(g, pts, tight());
  quad::require(res, "eval_sd(TF spatial)");
  return res.value / beta;
}

// R_β(U) for repeated use: short series below 1e-3, Chebyshev pieces of
// log R in log U up to 1e30, leading-order power law beyond.
class RTable {
 public:
  explicit RTable(double beta) : ml_(MLTable::get(beta)), beta_(beta) {
    // E_β(-y)^2 = Σ (-1)^k b_k y^k
    std::vector<double> c(12);
    for (int k = 0; k < 12; ++k) c[k] = reciprocal_gamma(1.0 + beta * k);
    for (int k = 0; k < 12; ++k) {
      double b = 0.0;
      for (int j = 0; j <= k; ++j) b += c[j] * c[k - j];
      series_.push_back((k % 2 == 0 ? 1.0 : -1.0) * b / (1.0 + beta * k));
    }
    v_lo_ = std::log(1e-3);
    v_hi_ = std::log(1e30);
    panels_ = static_cast<int>(std::ceil((v_hi_ - v_lo_) / 0.5));
    width_ = (v_hi_ - v_lo_) / panels_;
    const int n = kDeg + 1;
    cheb_.assign(static_cast<std::size_t>(panels_) * n, 0.0);
    std::vector<double> f(n);
    for (int p = 0; p < panels_; ++p) {
      const double a = v_lo_ + p * width_, b = a + width_;
      for (int j = 0; j < n; ++j) {
        const double x = std::cos(kPi * (j + 0.5) / n);
        f[j] = std::log(tf_R(*ml_, std::exp(0.5 * (a + b) + 0.5 * (b - a) * x)));
      }
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += f[j] * std::cos(kPi * k * (j + 0.5) / n);
        cheb_[static_cast<std::size_t>(p) * n + k] = (k == 0 ? 1.0 : 2.0) * acc / n;
      }
    }
    log_r_hi_ = eval_log(v_hi_);
  }

  double operator()(double U) const {
    if (U <= 1e-3) {
      double acc = 0.0, pw = 1.0;
      for (double b : series_) {
        acc += b * pw;
        pw *= U;
      }
      return acc;
    }
    const double v = std::log(U);
    if (v >= v_hi_) {
      // R ~ A U^{-2} (β < 1/2) or A U^{-2} log U (β = 1/2)
      double lr = log_r_hi_ - 2.0 * (v - v_hi_);
      if (beta_ == 0.5) lr += std::log(v / v_hi_);
      return std::exp(lr);
    }
    return std::exp(eval_log(v));
  }

  static std::shared_ptr<const RTable> get(double beta) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<const RTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(beta);
    if (it != cache.end()) return it->second;
    auto t = std::make_shared<const RTable>(beta);
    cache.emplace(beta, t);
    return t;
  }

 private:
  static constexpr int kDeg = 20;
  double eval_log(double v) const {
    int p = std::clamp(static_cast<int>((v - v_lo_) / width_), 0, panels_ - 1);
    const double x = 2.0 * (v - (v_lo_ + p * width_)) / width_ - 1.0;
    const double* c = &cheb_[static_cast<std::size_t>(p) * (kDeg + 1)];
    double b1 = 0.0, b2 = 0.0;
    for (int k = kDeg; k >= 1; --k) {
      const double t = 2.0 * x * b1 - b2 + c[k];
      b2 = b1;
      b1 = t;
    }
    return x * b1 - b2 + c[0];
  }
  std::shared_ptr<const MLTable> ml_;
  double beta_;
  std::vector<double> series_, cheb_;
  double v_lo_, v_hi_, width_, log_r_hi_;
  int panels_;
};

double lks_spatial(const ModelParams& p, double t, double xi) {
  const double q = xi * xi - 2.0 * p.theta;
  const double q2 = q * q;
  const double pre = two_pi_pow(p.dim);
  if (q2 == 0.0) return pre * t;
  const double x = p.epsilon * t * q2 / 4.0;
  return pre * t * (-std::expm1(-x)) / x;
}

// Frequencies past which a density has no more structure.
std::vector<double> spatial_knees(const SpectralDensity& sd) {
  const auto& p = sd.params;
  std::vector<double> k;
  if (p.family == Family::LKS) {
    const double s = std::sqrt(4.0 / (p.epsilon * sd.t_fixed));
    const double th2 = 2.0 * p.theta;
    for (double r2 : {th2 - s, th2, th2 + s})
      if (r2 > 0.0) k.push_back(std::sqrt(r2));
  } else {
    k.push_back(std::sqrt(2.0 / std::pow(sd.t_fixed, p.beta)));
  }
  return k;
}

}  // namespace

void SpectralDensity::validate() const {
  params.validate();
  if (field == Field::Gradient && params.dim != 1)
    throw DomainError("SpectralDensity: gradient densities are defined for dim = 1 only");
  if (axis == Axis::Spatial && (!(t_fixed > 0.0) || !std::isfinite(t_fixed)))
    throw DomainError("SpectralDensity: t_fixed must be positive");
}

bool SpectralDensity::extended_regime() const {
  if (params.family != Family::TF) return false;
  // dyadic β = 2^{-k}
  const double k = -std::log2(params.beta);
  return std::fabs(k - std::round(k)) > 1e-12;
}

std::string SpectralDensity::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << (axis == Axis::Temporal ? "temporal" : "spatial") << "/" << (field == Field::Base ? "base" : "gradient")
     << "/" << params.describe();
  if (axis == Axis::Spatial) os << "/t=" << t_fixed;
  if (extended_regime()) os << "/extended-regime";
  return os.str();
}

std::function<double(double)> density_function(const SpectralDensity& sd) {
  sd.validate();
  const ModelParams p = sd.params;
  const bool grad = sd.field == Field::Gradient;
  if (sd.axis == Axis::Temporal) {
    if (p.family == Family::LKS) {
      return [p, grad](double tau) {
        tau = std::fabs(tau);
        if (tau == 0.0) throw DomainError("eval_sd: temporal densities need a nonzero frequency");
        return lks_temporal(p, grad, tau);
      };
    }
    const double C = grad ? tf_temporal_gradient_constant(p.beta) : tf_temporal_constant(p.beta, p.dim);
    const double expo = grad ? 1.5 * p.beta - 2.0 : -(2.0 - 0.5 * p.beta * p.dim);
    return [C, expo](double tau) {
      tau = std::fabs(tau);
      if (tau == 0.0) throw DomainError("eval_sd: temporal densities need a nonzero frequency");
      return C * std::pow(tau, expo);
    };
  }
  const double t = sd.t_fixed;
  std::function<double(double)> base;
  if (p.family == Family::LKS) {
    base = [p, t](double xi) { return lks_spatial(p, t, std::fabs(xi)); };
  } else {
    auto R = RTable::get(p.beta);
    const double tb = std::pow(t, p.beta);
    const double pre = two_pi_pow(p.dim) * t;
    base = [R, tb, pre](double xi) { return pre * (*R)(xi * xi * tb / 2.0); };
  }
  if (!grad) return base;
  return [base](double xi) { return (xi * xi) * base(xi); };
}

double eval_sd(const SpectralDensity& sd, double freq) {
  if (!(freq >= 0.0) || !std::isfinite(freq)) throw DomainError("eval_sd: frequency must be finite and nonnegative");
  return density_function(sd)(freq);
}

double temporal_variogram(const SpectralDensity& sd, double lag) {
  if (sd.axis != Axis::Temporal) throw DomainError("temporal_variogram: needs a temporal density");
  lag = std::fabs(lag);
  if (!std::isfinite(lag)) throw DomainError("temporal_variogram: lag must be finite");
  auto D = density_function(sd);
  if (lag == 0.0) return 0.0;
  // u = lag τ:  (2/π)(1/lag) ∫_0^∞ (1 - cos u) Δ(u/lag) du
  auto f = [&](double u) { return D(u / lag); };
  const double u0 = 8.0 * kPi;
  std::vector<double> pts{0.0};
  for (int k = 60; k >= 1; --k) pts.push_back(u0 * std::ldexp(1.0, -k));
  for (int k = 1; k <= 8; ++k) pts.push_back(k * kPi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  quad::Options opt = tight();
  opt.rel_tol = 1e-11;
  auto head = quad::integrate([&](double u) { return u == 0.0 ? 0.0 : one_minus_weight(1, u) * f(u); }, pts, opt);
  quad::require(head, "temporal_variogram head");
  opt.abs_tol = 1e-13 * std::fabs(head.value);
  auto mass = quad::integrate_log_tail(f, u0, opt);
  quad::require(mass, "temporal_variogram tail");
  auto osc = quad::integrate_oscillatory([&](double u) { return std::cos(u) * f(u); }, u0,
                                         [](int k) { return (8.5 + k) * kPi; }, opt);
  quad::require(osc, "temporal_variogram oscillatory tail");
  return 2.0 / kPi / lag * (head.value + mass.value - osc.value);
}

double spatial_variogram(const SpectralDensity& sd, double h) {
  if (sd.axis != Axis::Spatial) throw DomainError("spatial_variogram: needs a spatial density");
  h = std::fabs(h);
  if (!std::isfinite(h)) throw DomainError("spatial_variogram: h must be finite");
  auto S = density_function(sd);
  if (h == 0.0) return 0.0;
  const int d = sd.params.dim;
  const double omega = unit_sphere_area(d);
  auto g = [&](double rho) { return omega * std::pow(rho, d - 1) * S(rho); };
  auto knees = spatial_knees(sd);
  const double reach = 4.0 * *std::max_element(knees.begin(), knees.end());
  int k0 = 3;
  while (detail::radial_zero(d, k0) / h < reach) ++k0;
  const double head_end = detail::radial_zero(d, k0) / h;

  std::vector<double> pts{0.0, head_end};
  for (double k : knees)
    for (double b = k; b < head_end; b *= 2.0) pts.push_back(b);
  if (k0 < 4000)
    for (int k = 0; k < k0; ++k) pts.push_back(detail::radial_zero(d, k) / h);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  quad::Options opt = tight();
  opt.rel_tol = 1e-11;
  auto head = quad::integrate([&](double rho) { return rho == 0.0 ? 0.0 : one_minus_weight(d, rho * h) * g(rho); },
                              pts, opt);
  quad::require(head, "spatial_variogram head");
  opt.abs_tol = 1e-13 * std::fabs(head.value);
  auto mass = quad::integrate_log_tail(g, head_end, opt);
  quad::require(mass, "spatial_variogram tail");
  auto osc = quad::integrate_oscillatory(
      [&](double rho) { return detail::radial_weight(d, rho * h) * g(rho); }, head_end,
      [&](int k) { return detail::radial_zero(d, k0 + 1 + k) / h; }, opt);
  quad::require(osc, "spatial_variogram oscillatory tail");
  return 2.0 * (head.value + mass.value - osc.value);
}

double spatial_variance(const SpectralDensity& sd) {
  if (sd.axis != Axis::Spatial) throw DomainError("spatial_variance: needs a spatial density");
  auto S = density_function(sd);
  const int d = sd.params.dim;
  auto g = [&](double rho) { return std::pow(rho, d - 1) * S(rho); };
  auto br = spatial_knees(sd);
  const double k = *std::max_element(br.begin(), br.end());
  br.push_back(4.0 * k);
  br.push_back(16.0 * k);
  auto res = quad::integrate_to_inf(g, 0.0, tight(), br);
  quad::require(res, "spatial_variance");
  return unit_sphere_area(d) * res.value;
}

double temporal_hurst(const SpectralDensity& sd) {
  sd.validate();
  if (sd.axis != Axis::Temporal) throw DomainError("temporal_hurst: needs a temporal density");
  const auto& p = sd.params;
  const bool grad = sd.field == Field::Gradient;
  if (p.family == Family::LKS) return grad ? 0.125 : (4.0 - p.dim) / 8.0;
  return grad ? (2.0 - 3.0 * p.beta) / 4.0 : (2.0 - p.beta * p.dim) / 4.0;
}

AsymptoteReport fit_asymptote(const SpectralDensity& sd, const FitWindow& w, LogPowerMode mode) {
  sd.validate();
  if (!(w.lo >= 10.0 && w.hi <= 1e8 && w.lo < w.hi)) throw DomainError("fit_asymptote: window must lie in [10, 1e8]");
  if (w.points < 20) throw DomainError("fit_asymptote: at least 20 evaluation points");
  bool with_log = mode == LogPowerMode::Include;
  if (mode == LogPowerMode::Auto)
    with_log = sd.axis == Axis::Spatial && sd.params.family == Family::TF && sd.params.beta == 0.5;

  auto S = density_function(sd);
  const int n = w.points, m = with_log ? 3 : 2;
  Eigen::MatrixXd X(n, m);
  Eigen::VectorXd y(n);
  const double l0 = std::log(w.lo), l1 = std::log(w.hi);
  for (int i = 0; i < n; ++i) {
    const double lf = l0 + (l1 - l0) * i / (n - 1);
    const double v = S(std::exp(lf));
    if (!(v > 0.0)) throw RangeError("fit_asymptote: density is not positive inside the window");
    X(i, 0) = 1.0;
    X(i, 1) = lf;
    if (with_log) X(i, 2) = std::log(lf);
    y(i) = std::log(v);
  }
  // condition number of the column-standardised design
  Eigen::MatrixXd Z = X;
  for (int j = 1; j < m; ++j) {
    const double mu = Z.col(j).mean();
    Z.col(j).array() -= mu;
    Z.col(j) /= Z.col(j).norm();
  }
  Z.col(0) /= Z.col(0).norm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svdZ(Z);
  const auto sv = svdZ.singularValues();
  const double cond = sv(0) / sv(m - 1);
  if (!std::isfinite(cond) || cond > 1e6) {
    std::ostringstream os;
    os << "fit_asymptote: ill-conditioned design (condition " << cond << ")";
    throw RangeError(os.str());
  }
  Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd r = y - X * beta;

  AsymptoteReport rep;
  rep.fitted_constant = std::exp(beta(0));
  rep.fitted_exponent = beta(1);
  rep.fitted_log_power = with_log ? beta(2) : 0.0;
  rep.log_power_fitted = with_log;
  rep.fit_window = w;
  rep.residual = std::sqrt(r.squaredNorm() / n);
  rep.condition = cond;
  return rep;
}

double tf_spatial_R_direct(double beta, double U) { return tf_R(*MLTable::get(beta), U); }
double tf_spatial_R(double beta, double U) { return (*RTable::get(beta))(U); }

double lks_temporal_constant(double eps, int d) {
  if (!(eps > 0.0)) throw DomainError("lks_temporal_constant: eps must be positive");
  // ∫_0^∞ u^{d-1}/(1+u^8) du = π / (8 sin(πd/8)), ρ = (8/ε)^{1/4} u
  return two_pi_pow(d) * unit_sphere_area(d) * std::pow(8.0 / eps, d / 4.0) * kPi / (8.0 * std::sin(kPi * d / 8.0));
}

double tf_temporal_constant(double beta, int d) {
  if (!(beta > 0.0 && beta <= 0.5)) throw DomainError("tf_temporal_constant: beta must lie in (0, 1/2]");
  const double cb = std::cos(kPi * beta / 2.0);
  auto g = [&](double u) {
    const double u2 = u * u;
    return std::pow(u, d - 1) / (1.0 + u2 * cb + u2 * u2 / 4.0);
  };
  auto res = quad::integrate_to_inf(g, 0.0, tight(), {1.0, 2.0});
  quad::require(res, "tf_temporal_constant");
  return two_pi_pow(d) * unit_sphere_area(d) * res.value;
}

double lks_spatial_tail_constant(double eps, int d) {
  if (!(eps > 0.0)) throw DomainError("lks_spatial_tail_constant: eps must be positive");
  return 4.0 / eps * two_pi_pow(d);
}

double tf_spatial_tail_constant(double beta, double t, int d) {
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("tf_spatial_tail_constant: needs 0 < beta < 1/2");
  const double g = std::tgamma(1.0 - beta);
  return 4.0 * std::pow(t, 1.0 - 2.0 * beta) / (g * g * (1.0 - 2.0 * beta)) * two_pi_pow(d);
}

}  // namespace spdelab
