#include "spdelab/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spdelab/parallel.hpp"
#include "spdelab/simd.hpp"
#include "spdelab/specfun.hpp"

namespace spdelab {

namespace {

struct LineFit {
  double slope, intercept, stderr_slope;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("regression: regressor is constant");
  const double b = sxy / sxx;
  const double a = my - b * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) sse += std::pow(y[i] - a - b * x[i], 2);
  const double se = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return {b, a, se};
}

// Linear interpolation between order statistics (the common "type 7" rule).
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double spacing_of(const SamplePathSet& p) {
  if (p.grid.size() < 2) throw DomainError("moduli: at least two grid points required");
  const double dt = p.grid[1] - p.grid[0];
  const double tol = 1e-9 * dt;
  for (std::size_t i = 2; i < p.grid.size(); ++i)
    if (std::fabs(p.grid[i] - p.grid[i - 1] - dt) > tol * static_cast<double>(i))
      throw DomainError("moduli: grid must be uniform");
  return dt;
}

void check_deltas(const std::vector<double>& deltas, double dt, const char* what) {
  if (deltas.empty()) throw DomainError(std::string(what) + ": empty delta grid");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw DomainError(std::string(what) + ": delta grid must be strictly decreasing");
  if (!(deltas.back() < 1.0)) throw DomainError(std::string(what) + ": deltas must be below 1");
  if (dt > deltas.back() / 10.0) {
    std::ostringstream os;
    os << what << ": grid spacing " << dt << " exceeds min(delta)/10 = " << deltas.back() / 10.0
       << "; refine the grid by a factor " << std::ceil(10.0 * dt / deltas.back());
    throw DomainError(os.str());
  }
}

void finish(ModulusReport& r, const ModulusSpec& spec) {
  const std::size_t n = r.statistic.size();
  for (double s : r.statistic)
    if (!std::isfinite(s)) throw RangeError("moduli: non-finite statistic");
  const std::size_t k = std::min<std::size_t>(5, n);
  double mean = 0.0;
  for (std::size_t i = n - k; i < n; ++i) mean += r.statistic[i];
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (std::size_t i = n - k; i < n; ++i) var += std::pow(r.statistic[i] - mean, 2);
  var = k > 1 ? var / static_cast<double>(k - 1) : 0.0;
  r.plateau_estimate = mean;
  r.plateau_cv = mean != 0.0 ? std::sqrt(var) / std::fabs(mean) : INFINITY;
  r.fitted_H = spec.H;
  r.fitted_H_stderr = 0.0;
  if (n >= 3) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(r.statistic[i] > 0.0)) return;
      x.push_back(std::log(r.delta_grid[i]));
      y.push_back(std::log(r.statistic[i]));
    }
    const auto f = fit_line(x, y);
    r.fitted_H = spec.H + f.slope;
    r.fitted_H_stderr = f.stderr_slope;
  }
}

}  // namespace

std::string mode_name(ModulusMode m) {
  switch (m) {
    case ModulusMode::Uniform: return "uniform";
    case ModulusMode::Local: return "local";
    case ModulusMode::Chung: return "chung";
  }
  return "?";
}

ModulusMode parse_mode(const std::string& s) {
  if (s == "uniform") return ModulusMode::Uniform;
  if (s == "local") return ModulusMode::Local;
  if (s == "chung") return ModulusMode::Chung;
  throw DomainError("unknown modulus mode '" + s + "'");
}

void ModulusSpec::validate() const {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("ModulusSpec: H must lie in (0,1)");
  if (!(log_power >= 0.0)) throw DomainError("ModulusSpec: log_power must be >= 0");
  if (!std::isfinite(loglog_power)) throw DomainError("ModulusSpec: loglog_power must be finite");
  if (mode != ModulusMode::Chung && loglog_power < 0.0)
    throw DomainError("ModulusSpec: loglog_power must be >= 0 outside Chung mode");
}

double ModulusSpec::normalizer(double h) const {
  const double L = std::log(1.0 / h);
  double v = std::pow(h, H);
  if (log_power != 0.0) v *= std::pow(L, log_power);
  if (loglog_power != 0.0) {
    if (!(L > 1.0)) throw DomainError("ModulusSpec: loglog(1/h) requires h < 1/e");
    v *= std::pow(std::log(L), loglog_power);
  }
  return v;
}

std::vector<double> geometric_deltas(double delta_max, int levels, double ratio) {
  if (!(delta_max > 0.0) || levels < 1 || !(ratio > 1.0)) throw DomainError("geometric_deltas: invalid arguments");
  std::vector<double> d(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) d[static_cast<std::size_t>(i)] = delta_max * std::pow(ratio, -i);
  return d;
}

std::vector<double> default_deltas(double spacing, int levels) {
  const double dmin = std::exp2(std::ceil(std::log2(10.0 * spacing)));
  return geometric_deltas(dmin * std::exp2(levels - 1), levels);
}

ModulusReport uniform_modulus_stat(const SamplePathSet& paths, const ModulusSpec& spec, double lo, double hi,
                                   const std::vector<double>& deltas, int lags_per_shell) {
  spec.validate();
  const double dt = spacing_of(paths);
  check_deltas(deltas, dt, "uniform_modulus_stat");
  if (lags_per_shell < 1) throw DomainError("uniform_modulus_stat: lags_per_shell must be >= 1");
  const double t0 = paths.grid.front();
  const auto i_lo = static_cast<std::size_t>(std::max(0.0, std::ceil((lo - t0) / dt - 1e-9)));
  const auto i_hi = std::min(paths.grid.size() - 1, static_cast<std::size_t>(std::floor((hi - t0) / dt + 1e-9)));
  if (!(i_hi > i_lo)) throw DomainError("uniform_modulus_stat: interval contains fewer than two grid points");
  const std::size_t m = i_hi - i_lo + 1;
  if (deltas.front() >= static_cast<double>(m - 1) * dt)
    throw DomainError("uniform_modulus_stat: largest delta exceeds the interval length");

  // Lag steps per shell [δ/2, δ), geometrically spread.
  std::vector<std::vector<std::size_t>> shells;
  for (double d : deltas) {
    const auto a = static_cast<std::size_t>(std::ceil(0.5 * d / dt - 1e-9));
    const auto b = static_cast<std::size_t>(std::ceil(d / dt - 1e-9)) - 1;  // largest step with step·dt < δ
    std::vector<std::size_t> steps;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(lags_per_shell), b - a + 1);
    for (std::size_t j = 0; j < count; ++j) {
      const double f = count == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(count - 1);
      const auto s = static_cast<std::size_t>(std::llround(static_cast<double>(a) * std::pow(double(b) / a, f)));
      if (steps.empty() || s != steps.back()) steps.push_back(s);
    }
    shells.push_back(std::move(steps));
  }

  const auto& kern = simd::active();
  std::vector<double> per(paths.replicas * deltas.size());
  parallel_for(paths.replicas, [&](std::size_t r) {
    const double* x = paths.row(r) + i_lo;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      double best = 0.0;
      for (std::size_t s : shells[k]) {
        double mx, sq;
        kern.increment_stats(x, m, s, &mx, &sq);
        best = std::max(best, mx / spec.normalizer(static_cast<double>(s) * dt));
      }
      per[r * deltas.size() + k] = best;
    }
  });

  ModulusReport rep;
  rep.mode = ModulusMode::Uniform;
  rep.delta_grid = deltas;
  rep.statistic.assign(deltas.size(), 0.0);
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    double s = 0.0;
    for (std::size_t r = 0; r < paths.replicas; ++r) s += per[r * deltas.size() + k];
    rep.statistic[k] = s / static_cast<double>(paths.replicas);
  }
  rep.notes = "replica mean of the shell supremum over lags in [delta/2, delta)";
  finish(rep, spec);
  return rep;
}

ModulusReport local_modulus_stat(const SamplePathSet& paths, const ModulusSpec& spec, double t0,
                                 const std::vector<double>& deltas) {
  spec.validate();
  const double dt = spacing_of(paths);
  check_deltas(deltas, dt, "local_modulus_stat");
  const double a = paths.grid.front(), b = paths.grid.back();
  if (t0 - deltas.front() < a - 1e-12 || t0 + deltas.front() > b + 1e-12)
    throw DomainError("local_modulus_stat: t0 must lie at least max(delta) inside the grid");
  const auto c = static_cast<std::size_t>(std::llround((t0 - a) / dt));
  const std::size_t n = paths.grid.size();

  std::vector<double> per(paths.replicas * deltas.size());
  parallel_for(paths.replicas, [&](std::size_t r) {
    const double* x = paths.row(r);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      const auto w = static_cast<std::size_t>(std::ceil(deltas[k] / dt - 1e-9)) - 1;
      double best = 0.0;
      for (std::size_t j = 1; j <= w; ++j) {
        if (c + j < n) best = std::max(best, std::fabs(x[c + j] - x[c]));
        if (j <= c) best = std::max(best, std::fabs(x[c - j] - x[c]));
      }
      per[r * deltas.size() + k] = best / spec.normalizer(deltas[k]);
    }
  });

  ModulusReport rep;
  rep.mode = ModulusMode::Local;
  rep.delta_grid = deltas;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    std::vector<double> v(paths.replicas);
    for (std::size_t r = 0; r < paths.replicas; ++r) v[r] = per[r * deltas.size() + k];
    const double p = 1.0 / std::log(1.0 / deltas[k]);
    rep.statistic.push_back(quantile(std::move(v), 1.0 - p));
  }
  rep.notes = "replica quantile at upper tail probability 1/log(1/delta); limsup and lim share this statistic";
  finish(rep, spec);
  return rep;
}

ModulusReport chung_stat(const SamplePathSet& paths, double H, const std::vector<double>& r_grid,
                         double loglog_power) {
  ModulusSpec spec{H, 0.0, loglog_power, ModulusMode::Chung};
  spec.validate();
  const double dt = spacing_of(paths);
  check_deltas(r_grid, dt, "chung_stat");
  const double a = paths.grid.front();
  if (std::fabs(a) > 1e-12) throw DomainError("chung_stat: paths must start at t = 0");
  if (r_grid.front() > paths.grid.back() - a + 1e-12) throw DomainError("chung_stat: r exceeds the grid");

  const auto& kern = simd::active();
  std::vector<double> per(paths.replicas * r_grid.size());
  parallel_for(paths.replicas, [&](std::size_t r) {
    const double* x = paths.row(r);
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
      const auto w = static_cast<std::size_t>(std::floor(r_grid[k] / dt + 1e-9));
      per[r * r_grid.size() + k] = kern.max_abs(x, w + 1) / spec.normalizer(r_grid[k]);
    }
  });

  ModulusReport rep;
  rep.mode = ModulusMode::Chung;
  rep.delta_grid = r_grid;
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    std::vector<double> v(paths.replicas);
    for (std::size_t r = 0; r < paths.replicas; ++r) v[r] = per[r * r_grid.size() + k];
    const double p = 1.0 / std::log(1.0 / r_grid[k]);
    rep.statistic.push_back(quantile(std::move(v), p));
  }
  rep.notes = "replica quantile at lower tail probability 1/log(1/r); liminf proxy = min over the last levels";
  finish(rep, spec);
  return rep;
}

bool is_monotone(const std::vector<double>& v, double rel_tol) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double slack = rel_tol * std::max(std::fabs(v[i]), std::fabs(v[i - 1]));
    if (v[i] < v[i - 1] - slack) up = false;
    if (v[i] > v[i - 1] + slack) down = false;
  }
  return up || down;
}

std::vector<std::size_t> log_lag_steps(std::size_t min_step, std::size_t max_step, int count) {
  if (min_step < 1 || max_step < min_step || count < 1) throw DomainError("log_lag_steps: invalid range");
  std::vector<std::size_t> s;
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    const auto v = static_cast<std::size_t>(
        std::llround(static_cast<double>(min_step) * std::pow(static_cast<double>(max_step) / min_step, f)));
    if (s.empty() || v != s.back()) s.push_back(v);
  }
  return s;
}

EmpiricalVariogram empirical_variogram(const SamplePathSet& paths, const std::vector<std::size_t>& lag_steps) {
  const double dt = spacing_of(paths);
  const std::size_t n = paths.grid.size();
  for (std::size_t s : lag_steps)
    if (s < 1 || s >= n) throw DomainError("empirical_variogram: lag step outside the grid");
  const auto& kern = simd::active();
  std::vector<double> per(paths.replicas * lag_steps.size());
  parallel_for(paths.replicas, [&](std::size_t r) {
    for (std::size_t k = 0; k < lag_steps.size(); ++k) {
      double mx, sq;
      kern.increment_stats(paths.row(r), n, lag_steps[k], &mx, &sq);
      per[r * lag_steps.size() + k] = sq / static_cast<double>(n - lag_steps[k]);
    }
  });
  EmpiricalVariogram v;
  for (std::size_t k = 0; k < lag_steps.size(); ++k) {
    double s = 0.0;
    for (std::size_t r = 0; r < paths.replicas; ++r) s += per[r * lag_steps.size() + k];
    v.lags.push_back(static_cast<double>(lag_steps[k]) * dt);
    v.second_moment.push_back(s / static_cast<double>(paths.replicas));
  }
  return v;
}

HolderFit holder_fit(const std::vector<double>& lags, const std::vector<double>& m2) {
  if (lags.size() != m2.size()) throw DomainError("holder_fit: size mismatch");
  if (lags.size() < 10) throw DomainError("holder_fit: at least 10 lags required");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!(lags[i] > 0.0) || !(m2[i] > 0.0)) throw DomainError("holder_fit: lags and moments must be positive");
    x.push_back(std::log(lags[i]));
    y.push_back(std::log(m2[i]));
  }
  const auto f = fit_line(x, y);
  return {0.5 * f.slope, 0.5 * f.stderr_slope, f.intercept};
}

LogFactorFit log_factor_detect(const std::vector<double>& lags, const std::vector<double>& m2, double H_fixed) {
  if (lags.size() != m2.size() || lags.size() < 3) throw DomainError("log_factor_detect: need >= 3 matched points");
  double lo = INFINITY, hi = 0.0;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (!(lags[i] > 0.0 && lags[i] < 1.0) || !(m2[i] > 0.0))
      throw DomainError("log_factor_detect: lags must lie in (0,1) and moments be positive");
    lo = std::min(lo, lags[i]);
    hi = std::max(hi, lags[i]);
    x.push_back(std::log(std::log(1.0 / lags[i])));
    y.push_back(std::log(m2[i]) - 2.0 * H_fixed * std::log(lags[i]));
  }
  if (hi / lo < 1e3) throw DomainError("log_factor_detect: lags must span at least three decades");
  // Condition number of [1, x] with unit-norm columns.
  double sx = 0.0, sxx = 0.0;
  for (double v : x) {
    sx += v;
    sxx += v * v;
  }
  const double n = static_cast<double>(x.size());
  const double c = sx / std::sqrt(n * sxx);  // cosine between the columns
  const double cond = std::sqrt((1.0 + std::fabs(c)) / std::max(1.0 - std::fabs(c), 1e-300));
  if (cond > 1e8) throw DomainError("log_factor_detect: design is collinear (condition " + std::to_string(cond) + ")");
  const auto f = fit_line(x, y);
  return {f.slope, f.stderr_slope, cond};
}

}  // namespace spdelab
