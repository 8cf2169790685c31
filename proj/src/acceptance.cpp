#include "spdelab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "spdelab/config.hpp"
#include "spdelab/covariance.hpp"
#include "spdelab/csv.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/moduli.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/sampler.hpp"
#include "spdelab/simd.hpp"
#include "spdelab/specfun.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Meta {
  int id;
  const char* title;
  double budget;
};

const Meta kMeta[] = {
    {1, "Mittag-Leffler bracket and large-argument asymptote", 5},
    {2, "Kernel Fourier transform consistency", 30},
    {3, "beta = 1/2 kernel identities", 60},
    {4, "bifBM identification of the L-KS temporal covariance", 60},
    {5, "Non-bifBM discrimination for the fractional covariance", 120},
    {6, "Self-similarity of the fractional covariance", 60},
    {7, "Spectral asymptotics and criticality", 120},
    {8, "Double-sided variogram bounds", 120},
    {9, "Strong local nondeterminism on random configurations", 120},
    {10, "Brownian calibration gates", 600},
    {11, "Moduli exponents on simulated paths", 1200},
    {12, "Determinism of stochastic outputs", 60},
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

class Recorder {
 public:
  Recorder(CriterionReport& rep, const RunConfig& cfg, std::ostream* out) : rep_(rep), cfg_(cfg), out_(out) {}

  double tol(const std::string& name) const {
    const auto it = cfg_.tolerances.find(name);
    if (it == cfg_.tolerances.end()) throw std::logic_error("unknown tolerance " + name);
    return it->second;
  }

  // known: reason the check cannot pass as written; only used when it fails.
  void check(const std::string& id, const std::string& target, double measured, double tolerance, bool pass,
             const std::string& note = "", const std::string& known = "") {
    CheckRow r{std::to_string(rep_.id) + "." + id, target, measured, tolerance,
               pass ? RowStatus::Pass : (known.empty() ? RowStatus::Fail : RowStatus::KnownFail), note};
    if (!pass && !known.empty()) r.note = (note.empty() ? "" : note + "; ") + "known: " + known;
    emit(std::move(r));
  }
  void at_most(const std::string& id, const std::string& target, double measured, double tolerance,
               const std::string& note = "", const std::string& known = "") {
    check(id, target, measured, tolerance, std::isfinite(measured) && measured <= tolerance, note, known);
  }
  void info(const std::string& id, const std::string& target, double measured, const std::string& note = "") {
    emit({std::to_string(rep_.id) + "." + id, target, measured, 0.0, RowStatus::Info, note});
  }

 private:
  void emit(CheckRow r) {
    if (out_) *out_ << format_row(r) << std::endl;
    rep_.rows.push_back(std::move(r));
  }
  CriterionReport& rep_;
  const RunConfig& cfg_;
  std::ostream* out_;
};

std::uint64_t base_seed(const RunConfig& cfg) { return cfg.seeds.empty() ? 20261016 : cfg.seeds.front(); }

SpectralDensity make_sd(Axis axis, Field field, const ModelParams& p) {
  SpectralDensity sd;
  sd.axis = axis;
  sd.field = field;
  sd.params = p;
  return sd;
}

// ---------------------------------------------------------------- 1
void c1(Recorder& R) {
  MLEvalPolicy raw;
  raw.clamp_to_bounds = false;
  int inside = 0, total = 0;
  double lit = 0.0, cor = 0.0, worst_gap = INFINITY;
  for (double beta : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    for (int i = 0; i < 60; ++i) {
      const double x = std::pow(10.0, -6.0 + 12.0 * i / 59.0);
      const double e = mittag_leffler(beta, -x, raw);
      const auto b = ml_bounds(beta, x);
      ++total;
      if (e >= b.lower && e <= b.upper) ++inside;
      worst_gap = std::min(worst_gap, std::min(e - b.lower, b.upper - e) / e);
      if (x > 1e3) {
        const double g = std::tgamma(1.0 - beta);
        lit = std::max(lit, std::fabs(e * x / g - 1.0));
        cor = std::max(cor, std::fabs(e * x * g - 1.0));
      }
    }
  }
  const double frac = static_cast<double>(inside) / total;
  R.check("bracket", "fraction of 300 (beta,x) points with E_beta(-x) inside the bracket", frac,
          R.tol("c1.bracket_fraction"), frac >= R.tol("c1.bracket_fraction"),
          "unclamped evaluation; smallest relative margin " + fmt(worst_gap, 3));
  R.at_most("asymptote_literal", "max |E x / Gamma(1-beta) - 1|, x > 1e3", lit, R.tol("c1.asymptote"), "",
            "the limit of E x / Gamma(1-beta) is 1/Gamma(1-beta)^2, not 1");
  R.at_most("asymptote", "max |E x Gamma(1-beta) - 1|, x > 1e3", cor, R.tol("c1.asymptote"));
}

// ---------------------------------------------------------------- 2
void c2(Recorder& R) {
  double worst = 0.0;
  std::string where;
  for (double theta : {0.0, 1.0})
    for (double eps : {1.0, 8.0})
      for (double t : {0.1, 1.0}) {
        const auto p = ModelParams::lks(eps, theta, 1);
        const double a = eps * t / 8.0;
        // transform negligible (e^{-40}) beyond xi_cut; kernel negligible beyond R
        const double xi_cut = std::sqrt(2.0 * theta + std::sqrt(40.0 / a));
        const double h = kPi / (2.0 * xi_cut);
        const double Rmax = 40.0 * std::pow(a, 0.25) + 10.0 * h;
        const int n = static_cast<int>(std::ceil(Rmax / h));
        std::vector<double> k(static_cast<std::size_t>(n) + 1);
        parallel_for(k.size(), [&](std::size_t j) { k[j] = lks_kernel(p, t, h * static_cast<double>(j)); });
        const double peak = lks_kernel_ft(p, t, std::sqrt(2.0 * theta));
        for (int m = 0; m <= 60; ++m) {
          const double xi = xi_cut * m / 60.0;
          double s = k[0];
          for (int j = 1; j <= n; ++j) s += 2.0 * k[static_cast<std::size_t>(j)] * std::cos(xi * h * j);
          const double dft = h * s / std::sqrt(2.0 * kPi);
          const double ex = lks_kernel_ft(p, t, xi);
          const double err = ex >= 1e-6 * peak ? std::fabs(dft / ex - 1.0) : std::fabs(dft - ex) / peak;
          if (err > worst) {
            worst = err;
            where = "theta=" + fmt(theta) + " eps=" + fmt(eps) + " t=" + fmt(t) + " xi=" + fmt(xi, 4);
          }
        }
      }
  R.at_most("ft", "max rel. error, trapezoidal transform of sampled kernel vs closed-form transform", worst,
            R.tol("c2.ft_rel"), "worst at " + where + "; relative to the peak where the transform is below 1e-6 of it");
}

// ---------------------------------------------------------------- 3
void c3(Recorder& R) {
  double w1 = 0.0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const double t = std::pow(10.0, -2.0 + 3.0 * i / 49.0);
      const double xi = 10.0 * j / 49.0;
      for (int d = 1; d <= 3; ++d) {
        const double a = tf_kernel_ft(ModelParams::tf(0.5, d), t, xi);
        const double b = btbm_ft(t, xi, d);
        w1 = std::max(w1, std::fabs(a / b - 1.0));
      }
    }
  R.at_most("btbm_ft", "max rel. diff, fractional transform at beta=1/2 vs Brownian-time form (50x50, d=1..3)", w1,
            R.tol("c3.btbm_rel"));
  std::vector<std::array<double, 3>> pts;
  for (int d : {1, 2})
    for (double t : {0.2, 1.0})
      // r = 0 is a singular point for d = 2
      for (double r : {0.1, 0.3, 1.0, 2.5, 4.0}) pts.push_back({static_cast<double>(d), t, r});
  std::vector<double> err(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const int d = static_cast<int>(pts[i][0]);
    const double a = tf_kernel(ModelParams::tf(0.5, d), pts[i][1], pts[i][2]);
    const double b = btbm_kernel_subordination(pts[i][1], pts[i][2], d);
    err[i] = std::fabs(a / b - 1.0);
  });
  R.at_most("subordination", "max rel. diff, inverse transform vs subordination integral (20 (d,t,r) points)",
            *std::max_element(err.begin(), err.end()), R.tol("c3.subordination_rel"));
}

// ---------------------------------------------------------------- 4
std::vector<double> fit_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 20; ++i) g.push_back(i / 20.0);
  return g;
}

void c4(Recorder& R, const RunConfig& cfg) {
  for (int d = 1; d <= 3; ++d) {
    const auto p = ModelParams::lks(1.0, 0.0, d);
    const double c = lks_bifbm_constant(1.0, d) * (1.0 + cfg.perturb_constant);
    const BifBMParams b{0.5, (4.0 - d) / 4.0, c};
    double w = 0.0;
    for (int i = 1; i <= 15; ++i)
      for (int j = 1; j <= 15; ++j) {
        const double t = 0.2 * i, s = 0.2 * j;
        w = std::max(w, std::fabs(lks_temporal_cov(p, t, s) / bifbm_cov(b, t, s) - 1.0));
      }
    R.at_most("cov_d" + std::to_string(d), "max rel. diff, L-KS temporal covariance vs c_d^2 R^{1/2,(4-d)/4} (15x15)",
              w, R.tol("c4.cov_rel"), "c_d = " + fmt(c, 15));
    const auto f = bifbm_fit([&](double t, double s) { return lks_temporal_cov(p, t, s); }, fit_grid());
    R.at_most("fit_residual_d" + std::to_string(d), "bifBM fit normalised residual", f.residual,
              R.tol("c4.fit_residual"));
    const double dp = std::max(std::fabs(f.params.H - 0.5), std::fabs(f.params.K - (4.0 - d) / 4.0));
    R.at_most("fit_params_d" + std::to_string(d), "max(|H_hat - 1/2|, |K_hat - (4-d)/4|)", dp, R.tol("c4.fit_param"),
              "H=" + fmt(f.params.H, 8) + " K=" + fmt(f.params.K, 8) + " scale=" + fmt(f.params.scale, 8));
  }
}

// ---------------------------------------------------------------- 5
void c5(Recorder& R) {
  const auto p = ModelParams::tf(0.5, 2);
  const auto f = bifbm_fit([&](double t, double s) { return tf_temporal_cov(p, t, s); }, fit_grid());
  R.check("residual", "bifBM fit normalised residual for the beta=1/2, d=2 fractional covariance (must exceed)",
          f.residual, R.tol("c5.residual_min"), f.residual > R.tol("c5.residual_min"),
          "best H=" + fmt(f.params.H, 6) + " K=" + fmt(f.params.K, 6) + "; grid {i/20}");
  const auto q = ModelParams::lks(1.0, 0.0, 2);
  const auto g = bifbm_fit([&](double t, double s) { return lks_temporal_cov(q, t, s); }, fit_grid());
  R.at_most("control", "control: bifBM fit residual for the L-KS d=2 covariance", g.residual,
            R.tol("c4.fit_residual"));
}

// ---------------------------------------------------------------- 6
void c6(Recorder& R) {
  struct Job {
    double beta;
    int d;
    double t, s;
  };
  std::vector<Job> jobs;
  for (double beta : {0.125, 0.25, 0.5})
    for (int d = 1; d <= 3; ++d)
      for (auto ts : {std::pair{1.0, 0.6}, std::pair{0.7, 0.2}}) jobs.push_back({beta, d, ts.first, ts.second});
  // The quadrature places its breakpoints relative to s, so both rows test
  // the homogeneity of the implemented formula rather than its accuracy;
  // the non-dyadic row rules out agreement through exact binary scaling.
  std::vector<double> err(jobs.size()), err_nd(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& j = jobs[i];
    const auto p = ModelParams::tf(j.beta, j.d);
    const double base = tf_temporal_cov(p, j.t, j.s);
    auto dev = [&](double c) {
      return std::fabs(tf_temporal_cov(p, c * j.t, c * j.s) / (std::pow(c, (2.0 - j.beta * j.d) / 2.0) * base) - 1.0);
    };
    err[i] = std::max({dev(0.5), dev(2.0), dev(4.0)});
    err_nd[i] = std::max(dev(0.7), dev(3.0));
  });
  R.at_most("scaling", "max rel. error of cov(ct,cs) = c^{(2-beta d)/2} cov(t,s) over 27 (c,beta,d) x 2 (t,s)",
            *std::max_element(err.begin(), err.end()), R.tol("c6.scaling_rel"));
  R.at_most("scaling_nondyadic", "same identity at c in {0.7, 3} (control against grid alignment)",
            *std::max_element(err_nd.begin(), err_nd.end()), R.tol("c6.scaling_rel"));
}

// ---------------------------------------------------------------- 7
void c7(Recorder& R) {
  const double te = R.tol("c7.exponent");
  for (int d = 1; d <= 3; ++d) {
    const auto a = fit_asymptote(make_sd(Axis::Temporal, Field::Base, ModelParams::lks(1.0, 0.0, d)));
    const double target = -(2.0 - d / 4.0);
    R.check("lks_temporal_d" + std::to_string(d), "L-KS temporal density exponent, target " + fmt(target),
            a.fitted_exponent, te, std::fabs(a.fitted_exponent - target) <= te);
  }
  for (int d = 1; d <= 3; ++d) {
    const auto a = fit_asymptote(make_sd(Axis::Spatial, Field::Base, ModelParams::lks(1.0, 0.0, d)));
    const double target = -(d + 2.0 * (2.0 - d / 2.0));
    R.check("lks_spatial_d" + std::to_string(d), "L-KS spatial density exponent, target " + fmt(target),
            a.fitted_exponent, te, std::fabs(a.fitted_exponent - target) <= te);
  }
  for (double beta : {0.125, 0.25, 0.375})
    for (int d = 1; d <= 3; ++d) {
      const auto sd = make_sd(Axis::Spatial, Field::Base, ModelParams::tf(beta, d));
      const auto a = fit_asymptote(sd, {}, LogPowerMode::Exclude);
      const double target = -(d + 2.0 * (2.0 - d / 2.0));
      const std::string tag = "_b" + fmt(beta) + "_d" + std::to_string(d);
      R.check("tf_spatial" + tag, "fractional spatial density exponent, target " + fmt(target), a.fitted_exponent,
              te, std::fabs(a.fitted_exponent - target) <= te);
      // constant with the exponent held at -4: geometric mean of S(xi) xi^4 over the window
      const FitWindow w{};
      double lc = 0.0;
      for (int i = 0; i < w.points; ++i) {
        const double xi = w.lo * std::pow(w.hi / w.lo, static_cast<double>(i) / (w.points - 1));
        lc += std::log(eval_sd(sd, xi) * std::pow(xi, 4.0));
      }
      const double C = std::exp(lc / w.points);
      const double ref = tf_spatial_tail_constant(beta, 1.0, d);
      R.check("tf_constant" + tag, "rel. diff of the fitted tail constant vs closed form", std::fabs(C / ref - 1.0),
              R.tol("c7.constant_rel"), std::fabs(C / ref - 1.0) <= R.tol("c7.constant_rel"),
              "fitted " + fmt(C, 8) + ", closed form " + fmt(ref, 8));
      const auto b = fit_asymptote(sd, {}, LogPowerMode::Include);
      R.check("tf_logpower" + tag, "fitted log-power p (below)", b.fitted_log_power, R.tol("c7.p_subcritical_max"),
              b.fitted_log_power < R.tol("c7.p_subcritical_max"));
    }
  for (int d = 1; d <= 3; ++d) {
    const auto b = fit_asymptote(make_sd(Axis::Spatial, Field::Base, ModelParams::tf(0.5, d)), {},
                                 LogPowerMode::Include);
    R.check("tf_logpower_b0.5_d" + std::to_string(d), "fitted log-power p at beta=1/2 (above)", b.fitted_log_power,
            R.tol("c7.p_critical_min"), b.fitted_log_power > R.tol("c7.p_critical_min"),
            "exponent " + fmt(b.fitted_exponent, 6));
  }
  for (double beta : {0.25, 0.5}) {
    const auto a = fit_asymptote(make_sd(Axis::Temporal, Field::Base, ModelParams::tf(beta, 1)));
    R.info("tf_temporal_b" + fmt(beta), "fractional temporal density exponent (target " + fmt(-(2.0 - beta / 2.0)) + ")",
           a.fitted_exponent);
  }
}

// ---------------------------------------------------------------- 8
void c8(Recorder& R) {
  struct Case {
    std::string tag;
    SpectralDensity sd;
  };
  std::vector<Case> cases;
  for (int d = 1; d <= 3; ++d)
    for (double th : {0.0, 1.0})
      cases.push_back({"lks_d" + std::to_string(d) + "_theta" + fmt(th),
                       make_sd(Axis::Temporal, Field::Base, ModelParams::lks(1.0, th, d))});
  for (double beta : {0.125, 0.25, 0.5})
    for (int d = 1; d <= 3; ++d)
      cases.push_back({"tf_b" + fmt(beta) + "_d" + std::to_string(d),
                       make_sd(Axis::Temporal, Field::Base, ModelParams::tf(beta, d))});
  cases.push_back({"lks_gradient", make_sd(Axis::Temporal, Field::Gradient, ModelParams::lks(1.0, 1.0, 1))});
  cases.push_back({"tf_gradient_b0.25", make_sd(Axis::Temporal, Field::Gradient, ModelParams::tf(0.25, 1))});
  std::vector<double> ratio(cases.size());
  parallel_for(cases.size(), [&](std::size_t i) {
    const double H = temporal_hurst(cases[i].sd);
    double lo = INFINITY, hi = 0.0;
    for (int k = 0; k <= 30; ++k) {
      const double lag = std::pow(10.0, -4.0 + 3.0 * k / 30.0);
      const double v = temporal_variogram(cases[i].sd, lag) / std::pow(lag, 2.0 * H);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ratio[i] = hi / lo;
  });
  for (std::size_t i = 0; i < cases.size(); ++i)
    R.at_most("temporal_" + cases[i].tag, "max/min of variogram(lag)/lag^{2H} on [1e-4, 1e-1]", ratio[i],
              R.tol("c8.ratio_max"));

  // Spatial gradient, d = 1: exponent 1/2 and the logarithmic factor at beta = 1/2.
  std::vector<double> lags;
  for (int k = 0; k < 16; ++k) lags.push_back(std::pow(10.0, -6.0 + 3.0 * k / 15.0));
  auto vario = [&](const SpectralDensity& sd) {
    std::vector<double> v(lags.size());
    parallel_for(lags.size(), [&](std::size_t k) { v[k] = spatial_variogram(sd, lags[k]); });
    return v;
  };
  const double ge = R.tol("c8.gradient_exponent");
  std::vector<std::pair<std::string, ModelParams>> grads{{"lks", ModelParams::lks(1.0, 0.0, 1)},
                                                         {"lks_theta1", ModelParams::lks(1.0, 1.0, 1)},
                                                         {"tf_b0.125", ModelParams::tf(0.125, 1)},
                                                         {"tf_b0.25", ModelParams::tf(0.25, 1)},
                                                         {"tf_b0.375", ModelParams::tf(0.375, 1)}};
  for (const auto& [tag, p] : grads) {
    const auto v = vario(make_sd(Axis::Spatial, Field::Gradient, p));
    const auto f = holder_fit(lags, v);
    R.check("spatial_gradient_" + tag, "Hoelder exponent of the d=1 gradient variogram on [1e-6, 1e-3], target 1/2",
            f.H, ge, std::fabs(f.H - 0.5) <= ge);
  }
  const auto v = vario(make_sd(Axis::Spatial, Field::Gradient, ModelParams::tf(0.5, 1)));
  const auto lf = log_factor_detect(lags, v, 0.5);
  R.check("log_power_b0.5", "log-power p of the beta=1/2 gradient variogram, target 1", lf.p, R.tol("c8.log_power"),
          std::fabs(lf.p - 1.0) <= R.tol("c8.log_power"), "stderr " + fmt(lf.stderr_p, 3));
  const auto v4 = vario(make_sd(Axis::Spatial, Field::Gradient, ModelParams::tf(0.25, 1)));
  R.info("log_power_b0.25", "log-power p of the beta=1/4 gradient variogram (expected 0)",
         log_factor_detect(lags, v4, 0.5).p);
}

// ---------------------------------------------------------------- 9
void c9(Recorder& R, const RunConfig& cfg) {
  struct Case {
    std::string tag;
    ModelParams p;
    bool phi_log;
  };
  const std::vector<Case> cases{{"lks_d3", ModelParams::lks(1.0, 0.0, 3), false},
                                {"tf_b0.25_d3", ModelParams::tf(0.25, 3), false},
                                {"tf_b0.5_d3", ModelParams::tf(0.5, 3), true}};
  for (const auto& c : cases) {
    const auto cov = tabulate_spatial_cov(make_sd(Axis::Spatial, Field::Base, c.p), 1e-5, 1.0);
    SlndOptions o;
    o.phi_log = c.phi_log;
    o.seed = base_seed(cfg) + 9;
    const auto r = slnd_check(cov, o);
    R.check(c.tag, "min over 1000 configurations (n <= 8) of Var(x|y)/min phi(|x-y|) (must exceed)", r.c_min, 0.0,
            r.c_min > 0.0,
            "normalised by gamma(box)/(2 phi(box)): " + fmt(r.normalized, 4) + ", worst n " + std::to_string(r.worst_n));
  }
}

// ---------------------------------------------------------------- 10
double levy_prediction(double delta) {
  // u solving 2 T u phi(u) = 1 with T = 1/δ; E sup ≈ u + γ/u (Gumbel mean).
  const double T = 1.0 / delta;
  double lo = 1.0, hi = 30.0;
  for (int i = 0; i < 200; ++i) {
    const double u = 0.5 * (lo + hi);
    const double f = std::log(2.0 * T * u) - 0.5 * u * u - 0.5 * std::log(2.0 * kPi);
    (f > 0.0 ? lo : hi) = u;
  }
  const double u = 0.5 * (lo + hi);
  return (u + 0.5772156649015329 / u) / std::sqrt(2.0 * std::log(T));
}

void c10(Recorder& R, const RunConfig& cfg) {
  const std::size_t N = 512, n = 1u << 14;
  const std::uint64_t seed = base_seed(cfg) + 10;

  const auto levy_paths = sample_brownian(n, 1.0, N, seed);
  const auto deltas = default_deltas(1.0 / n);
  const auto lev = uniform_modulus_stat(levy_paths, {0.5, 0.5, 0.0, ModulusMode::Uniform}, 0.0, 1.0, deltas);
  const double levy = lev.plateau_estimate / std::sqrt(2.0);
  double pred = 0.0;
  for (std::size_t i = deltas.size() - 5; i < deltas.size(); ++i) pred += levy_prediction(deltas[i]) / 5.0;
  R.check("levy", "uniform modulus plateau / sqrt(2), BM on [0,1], target 1", levy, R.tol("c10.levy"),
          std::fabs(levy - 1.0) <= R.tol("c10.levy"),
          "delta in [" + fmt(deltas.back()) + ", " + fmt(deltas[deltas.size() - 5]) + "], cv " + fmt(lev.plateau_cv, 3),
          "finite-delta extreme-value bias of about +14% at these delta (see levy_prediction)");
  R.info("levy_prediction", "second-order extreme-value prediction of the same plateau", pred);

  // Local LIL at an interior point on a grid centred at t0.
  const double dmax = 0.125;
  const auto lil_paths = sample_brownian(n, 2.0 * dmax, N, seed + 1);
  const auto ld = geometric_deltas(dmax, 8);
  const auto loc = local_modulus_stat(lil_paths, {0.5, 0.0, 0.5, ModulusMode::Local}, dmax, ld);
  const double lil = loc.plateau_estimate / std::sqrt(2.0);
  R.check("lil", "local modulus plateau with delta^{1/2} sqrt(2 loglog 1/delta), target 1", lil, R.tol("c10.lil"),
          std::fabs(lil - 1.0) <= R.tol("c10.lil"), "cv " + fmt(loc.plateau_cv, 3));

  // Chung: paths from 0 with the grid refined near the origin.
  const auto ch_paths = sample_brownian(n, dmax, N, seed + 2);
  const auto ch = chung_stat(ch_paths, 0.5, ld);
  const double proxy = *std::min_element(ch.statistic.end() - 5, ch.statistic.end());
  const double target = kPi / std::sqrt(8.0);
  R.check("chung", "Chung liminf proxy (min over the last 5 levels), target pi/sqrt(8) = 1.1107", proxy,
          R.tol("c10.chung"), std::fabs(proxy - target) <= R.tol("c10.chung"),
          "plateau " + fmt(ch.plateau_estimate, 4));
}

// ---------------------------------------------------------------- 11
void c11(Recorder& R, const RunConfig& cfg) {
  const double te = R.tol("c11.exponent");
  const std::uint64_t seed = base_seed(cfg) + 11;
  const UniformGrid tg{0.0, 1.0 / 4096.0, 4097};
  const auto lag_steps = log_lag_steps(1, 512, 20);

  struct Target {
    std::string tag;
    SpectralDensity sd;
    bool plateau;
  };
  std::vector<Target> temporal;
  for (int d = 1; d <= 3; ++d)
    temporal.push_back({"lks_d" + std::to_string(d), make_sd(Axis::Temporal, Field::Base, ModelParams::lks(1.0, 0.0, d)),
                        true});
  for (double beta : {0.25, 0.5})
    temporal.push_back({"tf_b" + fmt(beta), make_sd(Axis::Temporal, Field::Base, ModelParams::tf(beta, 1)), true});
  temporal.push_back({"lks_gradient", make_sd(Axis::Temporal, Field::Gradient, ModelParams::lks(1.0, 0.0, 1)), false});
  for (double beta : {0.25, 0.5})
    temporal.push_back(
        {"tf_gradient_b" + fmt(beta), make_sd(Axis::Temporal, Field::Gradient, ModelParams::tf(beta, 1)), false});

  for (std::size_t i = 0; i < temporal.size(); ++i) {
    const auto& T = temporal[i];
    const auto paths = sample_spectral_stat_increments(T.sd, tg, 64, seed + i);
    const auto v = empirical_variogram(paths, lag_steps);
    const auto f = holder_fit(v.lags, v.second_moment);
    const double H = temporal_hurst(T.sd);
    R.check("holder_" + T.tag, "Hoelder exponent from simulated temporal paths, target " + fmt(H, 4), f.H, te,
            std::fabs(f.H - H) <= te, "stderr " + fmt(f.stderr_H, 3));
    if (T.plateau) {
      const auto u = uniform_modulus_stat(paths, {H, 0.5, 0.0, ModulusMode::Uniform}, 0.0, 1.0,
                                          default_deltas(tg.spacing));
      R.at_most("plateau_cv_" + T.tag, "uniform modulus plateau CV with delta^H sqrt(log 1/delta)", u.plateau_cv,
                R.tol("c11.plateau_cv"), "plateau " + fmt(u.plateau_estimate, 4));
    }
  }

  const UniformGrid sg{0.0, 1.0 / 4096.0, 4097};
  const auto sp_steps = log_lag_steps(1, 64, 12);
  std::vector<std::pair<std::string, ModelParams>> grads{{"lks", ModelParams::lks(1.0, 0.0, 1)},
                                                         {"tf_b0.125", ModelParams::tf(0.125, 1)},
                                                         {"tf_b0.25", ModelParams::tf(0.25, 1)}};
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const auto sd = make_sd(Axis::Spatial, Field::Gradient, grads[i].second);
    const auto paths = sample_spectral_stationary(sd, sg, 256, seed + 100 + i);
    const auto v = empirical_variogram(paths, sp_steps);
    const auto f = holder_fit(v.lags, v.second_moment);
    R.check("holder_spatial_gradient_" + grads[i].first, "Hoelder exponent of simulated d=1 gradient fields, target 1/2",
            f.H, te, std::fabs(f.H - 0.5) <= te, "stderr " + fmt(f.stderr_H, 3));
  }
}

// ---------------------------------------------------------------- 12
void c12(Recorder& R, const RunConfig& cfg) {
  const std::uint64_t seed = base_seed(cfg) + 12;
  const UniformGrid tg{0.0, 1.0 / 512.0, 513};
  const UniformGrid sg{0.0, 1.0 / 1024.0, 513};  // Nyquist past the ξ^{-2} cutoff
  const auto sd_t = make_sd(Axis::Temporal, Field::Base, ModelParams::lks(1.0, 0.0, 1));
  const auto sd_s = make_sd(Axis::Spatial, Field::Gradient, ModelParams::tf(0.25, 1));
  std::vector<double> pts;
  for (int i = 1; i <= 24; ++i) pts.push_back(i / 24.0);
  auto cm = build_cov_matrix([](double t, double s) { return lks_temporal_cov(ModelParams::lks(1.0, 0.0, 1), t, s); },
                             pts);
  apply_jitter(cm);

  struct Cmd {
    std::string tag;
    std::function<std::string()> run;
  };
  const std::vector<Cmd> cmds{
      {"increments", [&] { return paths_to_csv(sample_spectral_stat_increments(sd_t, tg, 16, seed)); }},
      {"stationary", [&] { return paths_to_csv(sample_spectral_stationary(sd_s, sg, 16, seed)); }},
      {"cholesky", [&] { return paths_to_csv(sample_cholesky(cm, 16, seed)); }},
      {"brownian", [&] { return paths_to_csv(sample_brownian(512, 1.0, 16, seed)); }},
      {"moduli", [&] {
         const auto p = sample_brownian(1024, 1.0, 16, seed);
         return report_to_csv(uniform_modulus_stat(p, {0.5, 0.5, 0.0, ModulusMode::Uniform}, 0.0, 1.0,
                                                   default_deltas(1.0 / 1024, 6)));
       }}};

  const int threads = thread_count();
  for (const auto& c : cmds) {
    const std::string a = c.run();
    const std::string b = c.run();
    set_thread_count(threads > 1 ? 1 : 3);
    const std::string e = c.run();
    set_thread_count(threads);
    int mismatches = (a != b) + (a != e);
    std::string note = "repeat and a different worker count";
    if (const auto* v = simd::avx2_kernels()) {
      simd::force(&simd::scalar_kernels());
      const std::string s1 = c.run();
      simd::force(v);
      const std::string s2 = c.run();
      simd::force(nullptr);
      mismatches += (s1 != a) + (s2 != a);
      note += ", scalar and AVX2 kernels";
    }
    R.check(c.tag, "byte-identical CSV output across reruns (mismatch count)", mismatches, 0.0, mismatches == 0, note);
  }
}

}  // namespace

bool CriterionReport::passed() const {
  if (!error.empty()) return false;
  for (const auto& r : rows)
    if (r.status == RowStatus::Fail || r.status == RowStatus::KnownFail) return false;
  return true;
}

bool CriterionReport::only_known_failures() const {
  if (!error.empty()) return false;
  bool known = false;
  for (const auto& r : rows) {
    if (r.status == RowStatus::Fail) return false;
    if (r.status == RowStatus::KnownFail) known = true;
  }
  return known;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"c1.bracket_fraction", 1.0}, {"c1.asymptote", 0.01},
      {"c2.ft_rel", 1e-6},
      {"c3.btbm_rel", 1e-8},        {"c3.subordination_rel", 1e-4},
      {"c4.cov_rel", 1e-6},         {"c4.fit_residual", 1e-6},       {"c4.fit_param", 1e-3},
      {"c5.residual_min", 1e-3},
      {"c6.scaling_rel", 1e-5},
      {"c7.exponent", 0.02},        {"c7.constant_rel", 0.02},
      {"c7.p_subcritical_max", 0.15}, {"c7.p_critical_min", 0.85},
      {"c8.ratio_max", 10.0},       {"c8.gradient_exponent", 0.02},  {"c8.log_power", 0.2},
      {"c10.levy", 0.1},            {"c10.lil", 0.15},               {"c10.chung", 0.2},
      {"c11.exponent", 0.05},       {"c11.plateau_cv", 0.2},
  };
  return t;
}

std::vector<int> select_criteria(const std::vector<std::string>& only) {
  static const std::map<std::string, std::vector<int>> groups{
      {"specfun", {1}},         {"kernels", {2, 3}}, {"covariance", {4, 5, 6, 9}}, {"spectral", {7, 8}},
      {"sampler", {10, 12}},    {"moduli", {10, 11}}, {"determinism", {12}}};
  std::set<int> ids;
  if (only.empty())
    for (int i = 1; i <= 12; ++i) ids.insert(i);
  for (const auto& s : only) {
    if (auto it = groups.find(s); it != groups.end()) {
      ids.insert(it->second.begin(), it->second.end());
      continue;
    }
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || v < 1 || v > 12) throw DomainError("unknown criterion selector '" + s + "'");
    ids.insert(static_cast<int>(v));
  }
  return {ids.begin(), ids.end()};
}

std::string criterion_title(int id) {
  for (const auto& m : kMeta)
    if (m.id == id) return m.title;
  throw DomainError("no criterion " + std::to_string(id));
}

namespace {
CriterionReport run_one(int id, const RunConfig& cfg, std::ostream* out) {
  CriterionReport rep;
  rep.id = id;
  rep.title = criterion_title(id);
  rep.budget_seconds = kMeta[id - 1].budget;
  Recorder R(rep, cfg, out);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: c1(R); break;
      case 2: c2(R); break;
      case 3: c3(R); break;
      case 4: c4(R, cfg); break;
      case 5: c5(R); break;
      case 6: c6(R); break;
      case 7: c7(R); break;
      case 8: c8(R); break;
      case 9: c9(R, cfg); break;
      case 10: c10(R, cfg); break;
      case 11: c11(R, cfg); break;
      case 12: c12(R, cfg); break;
      default: throw DomainError("no criterion " + std::to_string(id));
    }
  } catch (const std::exception& e) {
    rep.error = e.what();
    R.check("error", "criterion raised an error", NAN, 0.0, false, e.what());
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  R.at_most("runtime", "wall time in seconds", rep.seconds, rep.budget_seconds);
  return rep;
}
}  // namespace

CriterionReport run_criterion(int id, const RunConfig& cfg) { return run_one(id, cfg, nullptr); }

std::vector<CriterionReport> run_acceptance(const RunConfig& cfg, std::ostream& out) {
  std::vector<CriterionReport> reps;
  for (int id : select_criteria(cfg.only)) {
    out << "== criterion " << id << ": " << criterion_title(id) << std::endl;
    reps.push_back(run_one(id, cfg, &out));
    const auto& r = reps.back();
    out << "== criterion " << id << " "
        << (r.passed() ? "PASS" : r.only_known_failures() ? "FAIL (documented)" : "FAIL") << " in "
        << fmt(r.seconds, 3) << " s" << std::endl;
  }
  return reps;
}

std::string status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Pass: return "PASS";
    case RowStatus::Fail: return "FAIL";
    case RowStatus::Info: return "INFO";
    case RowStatus::KnownFail: return "FAIL*";
  }
  return "?";
}

std::string format_row(const CheckRow& r) {
  std::ostringstream os;
  char head[64];
  std::snprintf(head, sizeof head, "[%-5s] %-28s", status_name(r.status).c_str(), r.id.c_str());
  os << head << " measured=" << fmt(r.measured, 8);
  if (r.status != RowStatus::Info) os << " tol=" << fmt(r.tolerance, 4);
  os << "  " << r.target;
  if (!r.note.empty()) os << "  (" << r.note << ")";
  return os.str();
}

std::string acceptance_csv(const std::vector<CriterionReport>& reps) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::string out = "id,target,measured,tolerance,pass,status,note\n";
  for (const auto& rep : reps)
    for (const auto& r : rep.rows) {
      const bool pass = r.status == RowStatus::Pass || r.status == RowStatus::Info;
      out += r.id + "," + quote(r.target) + "," + format_double(r.measured) + "," + format_double(r.tolerance) + "," +
             (pass ? "1" : "0") + "," + status_name(r.status) + "," + quote(r.note) + "\n";
    }
  return out;
}

}  // namespace spdelab
