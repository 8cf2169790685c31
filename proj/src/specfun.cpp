#include "spdelab/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "spdelab/quadrature.hpp"

namespace spdelab {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

// 1/Γ(z), zero at the poles.
double reciprocal_gamma(double z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (z > 0.0) {
    if (z > 171.0) return 0.0;
    return 1.0 / std::tgamma(z);
  }
  const double frac = z - std::round(z);
  if (std::fabs(frac) < 1e-14) return 0.0;
  const double g = std::tgamma(1.0 - z);
  if (!std::isfinite(g)) return std::numeric_limits<double>::infinity();
  return std::sin(kPi * frac) * (std::fmod(std::round(z), 2.0) == 0.0 ? 1.0 : -1.0) * g / kPi;
}


void MLEvalPolicy::validate() const {
  if (!(series_cutoff > 0.0) || !(asymptotic_cutoff > 0.0) || !(series_cutoff < asymptotic_cutoff))
    throw DomainError("MLEvalPolicy: require 0 < series_cutoff < asymptotic_cutoff");
  if (!(target_rel_tol > 0.0 && target_rel_tol <= 1e-3))
    throw DomainError("MLEvalPolicy: target_rel_tol must lie in (0, 1e-3]");
  if (series_terms_max < 1) throw DomainError("MLEvalPolicy: series_terms_max must be positive");
}

double gamma_fn(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma_fn: non-finite argument");
  if (is_nonpositive_integer(x)) throw DomainError("gamma_fn: pole at " + std::to_string(x));
  if (x > 171.6) throw RangeError("gamma_fn: overflow");
  return std::tgamma(x);
}

double erfcx(double x) {
  if (std::isnan(x)) throw DomainError("erfcx: NaN");
  if (x < 0.0) {
    if (x < -26.6) throw RangeError("erfcx: overflow for large negative argument");
    const double hi = x * x, lo = std::fma(x, x, -hi);
    return 2.0 * std::exp(hi) * (1.0 + lo) - erfcx(-x);
  }
  if (x < 26.0) {
    // x^2 split exactly so exp() sees no rounding of the square
    const double hi = x * x, lo = std::fma(x, x, -hi);
    return std::exp(hi) * (1.0 + lo) * std::erfc(x);
  }
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
    if (std::fabs(term) < 1e-18) break;
  }
  return sum / (x * std::sqrt(kPi));
}

double mills_ratio(double x) {
  if (!(x > 0.0)) throw DomainError("mills_ratio: x must be positive");
  return std::sqrt(kPi / 2.0) * erfcx(x / std::numbers::sqrt2);
}

MLBounds ml_bounds(double beta, double x) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("ml_bounds: beta must lie in (0,1)");
  if (!(x > 0.0)) throw DomainError("ml_bounds: x must be positive");
  return {1.0 / (1.0 + std::tgamma(1.0 - beta) * x), 1.0 / (1.0 + x / std::tgamma(1.0 + beta))};
}

namespace detail {

bool ml_series(double beta, double x, const MLEvalPolicy& p, double& out) {
  double sum = 1.0, maxterm = 1.0;
  int small = 0;
  const double lx = std::log(std::fabs(x));
  for (int k = 1; k <= p.series_terms_max; ++k) {
    const double g = 1.0 + beta * k;
    double mag;
    if (g < 171.0) mag = std::pow(std::fabs(x), k) / std::tgamma(g);
    else mag = std::exp(k * lx - std::lgamma(g));
    if (!std::isfinite(mag) || mag > 1e300) return false;
    const double term = (x < 0.0 && (k % 2 == 1)) ? -mag : mag;
    sum += term;
    maxterm = std::max(maxterm, mag);
    if (mag < p.target_rel_tol * 1e-2 * std::fabs(sum)) {
      if (++small >= 3) {
        // cancellation: digits lost to terms much larger than the result
        if (maxterm > 4.0 * std::fabs(sum) && x < 0.0) return false;
        out = sum;
        return true;
      }
    } else {
      small = 0;
    }
  }
  return false;
}

bool ml_asymptotic(double beta, double y, const MLEvalPolicy& p, double& out) {
  double sum = 0.0, prev = std::numeric_limits<double>::infinity();
  const double ly = std::log(y);
  for (int m = 1; m <= 400; ++m) {
    const double rg = reciprocal_gamma(1.0 - beta * m);
    if (!std::isfinite(rg)) return false;
    const double term = (m % 2 == 1 ? 1.0 : -1.0) * rg * std::exp(-m * ly);
    const double mag = std::fabs(term);
    if (rg == 0.0) continue;
    if (mag > prev && m > 2) return false;  // divergence before reaching tolerance
    sum += term;
    prev = mag;
    if (sum != 0.0 && mag < 1e-2 * p.target_rel_tol * std::fabs(sum)) {
      out = sum;
      return true;
    }
  }
  return false;
}

double ml_integral(double beta, double y, double rel_tol) {
  const double cb = std::cos(beta * kPi), sb = std::sin(beta * kPi);
  const double inv_beta = 1.0 / beta;
  const double W = std::pow(745.0, beta);
  auto f = [&](double w) {
    const double e = std::exp(-std::pow(w, inv_beta));
    if (e == 0.0) return 0.0;
    // w^2 + 2 w y cos + y^2 written as (w + y cos)^2 + (y sin)^2 to avoid cancellation
    const double u = w + y * cb, v = y * sb;
    return e * y / (u * u + v * v);
  };
  std::vector<double> pts{0.0};
  for (double s : {1e-3, 1e-2, 1e-1, 1.0, 10.0})
    if (s * y < W) pts.push_back(s * y);
  if (cb < 0.0 && -y * cb < W) pts.push_back(-y * cb);
  if (1.0 < W) pts.push_back(1.0);
  pts.push_back(W);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  quad::Options opt;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-300;
  opt.max_intervals = 20000;
  auto r = quad::integrate(f, pts, opt);
  quad::require(r, "mittag_leffler integral representation");
  return sb / (kPi * beta) * r.value;
}

}  // namespace detail

double mittag_leffler(double beta, double x, const MLEvalPolicy& policy) {
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("mittag_leffler: beta must lie in (0,1]");
  if (std::isnan(x)) throw DomainError("mittag_leffler: NaN argument");
  policy.validate();
  if (beta == 1.0) {
    if (x > 709.0) throw RangeError("mittag_leffler: overflow");
    return std::exp(x);
  }
  if (x == 0.0) return 1.0;
  if (x > 0.0) {
    double v;
    if (!detail::ml_series(beta, x, policy, v) || !std::isfinite(v))
      throw RangeError("mittag_leffler: series overflow or non-convergence for positive argument");
    return v;
  }
  const double y = -x;
  double v = 0.0;
  bool done = false;
  if (y <= policy.series_cutoff) done = detail::ml_series(beta, x, policy, v);
  if (!done && y >= policy.asymptotic_cutoff) done = detail::ml_asymptotic(beta, y, policy, v);
  if (!done) v = detail::ml_integral(beta, y, policy.target_rel_tol);
  if (!policy.clamp_to_bounds) return v;
  const auto b = ml_bounds(beta, y);
  return std::clamp(v, b.lower, b.upper);
}

double hyp2F1(double a, double b, double c, double z, double rel_tol, int max_terms) {
  if (is_nonpositive_integer(c)) throw DomainError("hyp2F1: c is a nonpositive integer");
  if (!(z > -1.0 && z <= 1.0)) throw DomainError("hyp2F1: z must lie in (-1, 1]");
  if (a > b) std::swap(a, b);  // canonical order makes the (a,b) symmetry exact
  if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;
  if (z == 1.0) {
    const double s = c - a - b;
    if (!(s > 0.0)) throw DomainError("hyp2F1: divergent at z = 1 (c - a - b <= 0)");
    return std::tgamma(c) * std::tgamma(s) * reciprocal_gamma(c - a) * reciprocal_gamma(c - b);
  }
  auto series = [&](double A, double B, double C, double Z) {
    double term = 1.0, sum = 1.0;
    int small = 0;
    for (int n = 0; n < max_terms; ++n) {
      term *= (A + n) * (B + n) / ((C + n) * (n + 1.0)) * Z;
      sum += term;
      if (term == 0.0) return sum;
      if (std::fabs(term) < rel_tol * std::fabs(sum)) {
        if (++small >= 3) return sum;
      } else {
        small = 0;
      }
    }
    throw DomainError("hyp2F1: series did not converge within the term cap");
  };
  if (z < -0.5) {
    // Pfaff: z/(z-1) lies in (1/3, 1/2)
    return std::pow(1.0 - z, -a) * series(a, c - b, c, z / (z - 1.0));
  }
  if (z > 0.9) {
    const double s = c - a - b;
    if (std::fabs(s - std::round(s)) > 1e-6) {
      const double w = 1.0 - z;
      const double t1 = std::tgamma(c) * std::tgamma(s) * reciprocal_gamma(c - a) * reciprocal_gamma(c - b);
      const double t2 = std::tgamma(c) * std::tgamma(-s) * reciprocal_gamma(a) * reciprocal_gamma(b);
      double v = 0.0;
      if (t1 != 0.0) v += t1 * series(a, b, 1.0 - s, w);
      if (t2 != 0.0) v += t2 * std::pow(w, s) * series(c - a, c - b, 1.0 + s, w);
      return v;
    }
  }
  return series(a, b, c, z);
}

}  // namespace spdelab
