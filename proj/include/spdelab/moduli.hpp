// Path statistics for moduli of continuity: uniform and local modulus
// ratios, the Chung running-maximum ratio, Hölder-exponent regression and
// detection of a logarithmic factor in second moments.
#pragma once

#include <string>
#include <vector>

#include "spdelab/sampler.hpp"

namespace spdelab {

enum class ModulusMode { Uniform, Local, Chung };

std::string mode_name(ModulusMode m);
ModulusMode parse_mode(const std::string& s);

// Normaliser h^H · log(1/h)^log_power · loglog(1/h)^loglog_power.
struct ModulusSpec {
  double H = 0.5;
  double log_power = 0.0;
  double loglog_power = 0.0;
  ModulusMode mode = ModulusMode::Uniform;

  void validate() const;
  double normalizer(double h) const;
};

struct ModulusReport {
  ModulusMode mode = ModulusMode::Uniform;
  std::vector<double> delta_grid;  // strictly decreasing
  std::vector<double> statistic;
  double plateau_estimate = 0.0;   // mean over the last five levels
  double plateau_cv = 0.0;         // sample sd / mean over the same levels
  double fitted_H = 0.0;           // H plus the log-log slope of the statistic
  double fitted_H_stderr = 0.0;
  std::string notes;
};

// δ_max, δ_max/ratio, ... (levels values).
std::vector<double> geometric_deltas(double delta_max, int levels, double ratio = 2.0);
// Largest-first power-of-two grid whose smallest level is ≥ 10·spacing.
std::vector<double> default_deltas(double spacing, int levels = 8);

// Replica mean of max over lags h in [δ/2, δ) inside [lo, hi] of
// max|U(t+h)-U(t)| / normaliser(h). Up to lags_per_shell lags per shell.
ModulusReport uniform_modulus_stat(const SamplePathSet& paths, const ModulusSpec& spec, double lo, double hi,
                                   const std::vector<double>& deltas, int lags_per_shell = 8);

// sup_{|s-t0|<δ} |U(s)-U(t0)| / normaliser(δ); the replica quantile at upper
// tail probability 1/log(1/δ) is reported for each δ.
ModulusReport local_modulus_stat(const SamplePathSet& paths, const ModulusSpec& spec, double t0,
                                 const std::vector<double>& deltas);

// max_{[0,r]} |U| / (r^H · loglog(1/r)^{loglog_power}); loglog_power = -H is
// the Chung normaliser. Lower replica quantile at probability 1/log(1/r).
ModulusReport chung_stat(const SamplePathSet& paths, double H, const std::vector<double>& r_grid,
                         double loglog_power);
inline ModulusReport chung_stat(const SamplePathSet& paths, double H, const std::vector<double>& r_grid) {
  return chung_stat(paths, H, r_grid, -H);
}

// True when the statistic moves in one direction over the levels (ties
// allowed up to rel_tol).
bool is_monotone(const std::vector<double>& v, double rel_tol = 0.0);

struct EmpiricalVariogram {
  std::vector<double> lags;
  std::vector<double> second_moment;  // mean over replicas and positions
};

std::vector<std::size_t> log_lag_steps(std::size_t min_step, std::size_t max_step, int count);
EmpiricalVariogram empirical_variogram(const SamplePathSet& paths, const std::vector<std::size_t>& lag_steps);

struct HolderFit {
  double H = 0.0;
  double stderr_H = 0.0;
  double intercept = 0.0;
};

// log m2 = a + 2H log lag by least squares; at least 10 lags.
HolderFit holder_fit(const std::vector<double>& lags, const std::vector<double>& m2);

struct LogFactorFit {
  double p = 0.0;
  double stderr_p = 0.0;
  double condition = 0.0;  // of the standardised design
};

// log m2 - 2H log r = a + p log log(1/r); lags < 1 spanning ≥ 3 decades.
LogFactorFit log_factor_detect(const std::vector<double>& lags, const std::vector<double>& m2, double H_fixed);

}  // namespace spdelab
