#include "spdelab/mltable.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <algorithm>

#include "spdelab/specfun.hpp"

namespace spdelab {

MLTable::MLTable(double beta) : beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("MLTable: beta must lie in (0,1)");
  g1m_ = std::tgamma(1.0 - beta);
  y_lo_ = 1e-3;
  for (int k = 0; k < 12; ++k) series_.push_back(1.0 / std::tgamma(1.0 + beta * k));

  // smallest tail start where the inverse-power expansion reaches round-off
  MLEvalPolicy strict;
  strict.target_rel_tol = 1e-16;
  strict.series_cutoff = 1.0;
  strict.asymptotic_cutoff = 2.0;
  y_hi_ = 0.0;
  for (double y : {10.0, 15.0, 20.0, 30.0, 50.0, 75.0, 100.0, 150.0, 200.0, 300.0, 500.0, 1000.0}) {
    double v;
    if (detail::ml_asymptotic(beta, y, strict, v)) {
      y_hi_ = y;
      break;
    }
  }
  if (y_hi_ == 0.0) throw RangeError("MLTable: inverse-power expansion never converges below y = 1000");
  {
    const double ly = std::log(y_hi_);
    double sum = 0.0;
    for (int m = 1; m <= 400; ++m) {
      const double rg = reciprocal_gamma(1.0 - beta * m);
      const double c = (m % 2 == 1 ? 1.0 : -1.0) * rg;
      asym_.push_back(c);
      sum += c * std::exp(-m * ly);
      if (rg != 0.0 && std::fabs(c) * std::exp(-m * ly) < 1e-18 * std::fabs(sum)) break;
    }
  }

  v_lo_ = std::log(y_lo_);
  const double v_hi = std::log(y_hi_);
  width_ = 0.5;
  panels_ = static_cast<int>(std::ceil((v_hi - v_lo_) / width_));
  width_ = (v_hi - v_lo_) / panels_;
  const int n = degree_ + 1;
  cheb_.assign(static_cast<std::size_t>(panels_) * n, 0.0);
  std::vector<double> f(n);
  for (int p = 0; p < panels_; ++p) {
    const double a = v_lo_ + p * width_, b = a + width_;
    for (int j = 0; j < n; ++j) {
      const double x = std::cos(std::numbers::pi * (j + 0.5) / n);
      const double y = std::exp(0.5 * (a + b) + 0.5 * (b - a) * x);
      f[j] = mittag_leffler(beta, -y) * (1.0 + g1m_ * y);
    }
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += f[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
      cheb_[static_cast<std::size_t>(p) * n + k] = (k == 0 ? 1.0 : 2.0) * s / n;
    }
  }
}

double MLTable::operator()(double y) const {
  if (y <= y_lo_) {
    if (y < 0.0) throw DomainError("MLTable: argument must be nonnegative");
    double s = 0.0, pw = 1.0;
    for (double c : series_) {
      s += c * pw;
      pw *= -y;
    }
    return s;
  }
  if (y >= y_hi_) {
    const double iy = 1.0 / y;
    double s = 0.0;
    for (std::size_t m = asym_.size(); m-- > 0;) s = (s + asym_[m]) * iy;
    return s;
  }
  const double v = std::log(y);
  int p = static_cast<int>((v - v_lo_) / width_);
  p = std::clamp(p, 0, panels_ - 1);
  const double a = v_lo_ + p * width_;
  const double x = 2.0 * (v - a) / width_ - 1.0;
  const double* c = &cheb_[static_cast<std::size_t>(p) * (degree_ + 1)];
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree_; k >= 1; --k) {
    const double t = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = t;
  }
  const double h = x * b1 - b2 + c[0];
  return h / (1.0 + g1m_ * y);
}

std::shared_ptr<const MLTable> MLTable::get(double beta) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const MLTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(beta);
  if (it != cache.end()) return it->second;
  auto t = std::make_shared<const MLTable>(beta);
  cache.emplace(beta, t);
  return t;
}

}  // namespace spdelab
