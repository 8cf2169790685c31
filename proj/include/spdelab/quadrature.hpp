// Adaptive Gauss-Kronrod quadrature, semi-infinite maps and oscillatory
// tails summed between zeros with Wynn epsilon extrapolation.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdelab::quad {

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double abserr = 0.0;
  long evals = 0;
  bool converged = true;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980276802, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Piece {
  double a, b, value, err;
  bool operator<(const Piece& o) const { return err < o.err; }
};

// One 21-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
Piece gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * wgk[10], resg = 0.0, resabs = std::fabs(resk);
  double fv1[10], fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = h * xgk[j];
    const double f1 = f(c - dx), f2 = f(c + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += wgk[j] * (f1 + f2);
    resabs += wgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * resk;
  double resasc = wgk[10] * std::fabs(fc - mean);
  for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
  resk *= h;
  resg *= h;
  resabs *= std::fabs(h);
  resasc *= std::fabs(h);
  double err = std::fabs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (4.0 * eps)) err = std::max(4.0 * eps * resabs, err);
  if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk, err};
}

}  // namespace detail

// Globally adaptive integration over consecutive breakpoints.
template <class F>
Result integrate(F&& f, const std::vector<double>& pts, const Options& opt = {}) {
  std::priority_queue<detail::Piece> heap;
  Result r;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    auto p = detail::gk21(f, pts[i], pts[i + 1]);
    r.evals += 21;
    total += p.value;
    err += p.err;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  while (!heap.empty() && err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
    if (count >= opt.max_intervals) {
      r.converged = false;
      break;
    }
    auto p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {  // interval exhausted at machine resolution
      r.converged = false;
      break;
    }
    auto l = detail::gk21(f, p.a, m), u = detail::gk21(f, m, p.b);
    r.evals += 42;
    total += l.value + u.value - p.value;
    err += l.err + u.err - p.err;
    heap.push(l);
    heap.push(u);
    ++count;
  }
  if (!heap.empty()) {
    // resum to shed accumulated update round-off
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
      total += heap.top().value;
      err += heap.top().err;
      heap.pop();
    }
  }
  r.value = total;
  r.abserr = err;
  if (!std::isfinite(total)) r.converged = false;
  return r;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  return integrate(f, std::vector<double>{a, b}, opt);
}

// ∫_a^∞ f via x = a + (1-u)/u, with optional interior breakpoints in x.
template <class F>
Result integrate_to_inf(F&& f, double a, const Options& opt = {}, std::vector<double> xbreaks = {}) {
  auto g = [&](double u) {
    const double x = a + (1.0 - u) / u;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (u * u);
  };
  std::vector<double> pts{0.0};
  std::sort(xbreaks.begin(), xbreaks.end(), std::greater<double>());
  for (double x : xbreaks)
    if (x > a) pts.push_back(1.0 / (1.0 + (x - a)));
  pts.push_back(1.0);
  return integrate(g, pts, opt);
}

// ∫_a^∞ f for slowly (algebraically) decaying f: x = a e^s, s in [0, s_max].
template <class F>
Result integrate_log_tail(F&& f, double a, const Options& opt = {}, double s_max = 240.0) {
  if (!(a > 0.0)) throw QuadratureError("integrate_log_tail: a must be positive");
  auto g = [&](double s) {
    const double x = a * std::exp(s);
    const double v = f(x);
    return v == 0.0 ? 0.0 : v * x;
  };
  std::vector<double> pts;
  for (double s = 0.0; s < s_max; s += 8.0) pts.push_back(s);
  pts.push_back(s_max);
  return integrate(g, pts, opt);
}

// Wynn epsilon extrapolation of a sequence of partial sums.
class WynnEpsilon {
 public:
  void push(double s) {
    // nd[j] = eps_j^{(n+1-j)} built from the previous anti-diagonal d
    std::vector<double> nd{s};
    for (std::size_t j = 1; j <= d_.size(); ++j) {
      const double diff = nd[j - 1] - d_[j - 1];
      if (diff == 0.0 || !std::isfinite(diff)) break;
      nd.push_back((j >= 2 ? d_[j - 2] : 0.0) + 1.0 / diff);
    }
    d_ = nd;
    double best = s;
    for (std::size_t j = 0; j < nd.size(); j += 2)
      if (std::isfinite(nd[j])) best = nd[j];
    history_.push_back(best);
    if (d_.size() > 40) d_.resize(40);
  }
  double estimate() const { return history_.empty() ? 0.0 : history_.back(); }
  double delta() const {
    if (history_.size() < 2) return std::numeric_limits<double>::infinity();
    return std::fabs(history_.back() - history_[history_.size() - 2]);
  }
  std::size_t size() const { return history_.size(); }

 private:
  std::vector<double> d_, history_;
};

// ∫_a^∞ h(x) dx for an oscillatory h whose sign changes at zeros(k), k=0,1,...
// (increasing, all > a). Contributions between successive zeros are summed and
// the partial sums are extrapolated.
template <class F, class Z>
Result integrate_oscillatory(F&& h, double a, Z&& zeros, const Options& opt = {}, int max_cycles = 4000) {
  Options inner = opt;
  inner.abs_tol = opt.abs_tol * 1e-2;
  Result r;
  double lo = a;
  double sum = 0.0;
  WynnEpsilon wynn;
  int stable = 0;
  double last_piece = std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_cycles; ++k) {
    const double hi = zeros(k);
    if (hi <= lo) continue;
    auto p = integrate(h, lo, hi, inner);
    r.evals += p.evals;
    r.abserr += p.abserr;
    if (!p.converged) r.converged = false;
    sum += p.value;
    lo = hi;
    wynn.push(sum);
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(wynn.estimate()));
    if (std::fabs(p.value) < 0.1 * tol && std::fabs(last_piece) < 0.1 * tol) {
      r.value = sum;
      return r;
    }
    last_piece = p.value;
    if (wynn.size() >= 8 && wynn.delta() < tol) {
      if (++stable >= 3) {
        r.value = wynn.estimate();
        r.abserr += wynn.delta();
        return r;
      }
    } else {
      stable = 0;
    }
  }
  r.value = wynn.estimate();
  r.converged = false;
  return r;
}

inline void require(const Result& r, const std::string& what) {
  if (!r.converged)
    throw QuadratureError(what + ": quadrature did not converge (value " + std::to_string(r.value) +
                          ", error estimate " + std::to_string(r.abserr) + ", evals " +
                          std::to_string(r.evals) + ")");
}

}  // namespace spdelab::quad
