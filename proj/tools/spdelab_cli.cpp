// Command-line entry point: evaluation, simulation, estimation and the
// acceptance run. Every invocation writes a JSON manifest.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "spdelab/acceptance.hpp"
#include "spdelab/config.hpp"
#include "spdelab/covariance.hpp"
#include "spdelab/csv.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/moduli.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/sampler.hpp"
#include "spdelab/specfun.hpp"
#include "spdelab/spectral.hpp"

using namespace spdelab;
namespace fs = std::filesystem;

namespace {

struct ModelOpts {
  std::string family;
  int d = 0;
  double epsilon = NAN, theta = NAN, beta = NAN, t = NAN;

  void add(CLI::App* app) {
    app->add_option("--family", family, "LKS or TF");
    app->add_option("--d,--dim", d, "spatial dimension 1..3");
    app->add_option("--epsilon,--eps", epsilon, "L-KS epsilon");
    app->add_option("--theta", theta, "L-KS theta");
    app->add_option("--beta", beta, "fractional order in (0, 1/2]");
    app->add_option("--t", t, "time (spatial densities, kernels)");
  }
  // Command-line values override the configuration.
  void apply(RunConfig& cfg) const {
    if (!family.empty()) cfg.params.family = parse_family(family);
    if (d) cfg.params.dim = d;
    if (!std::isnan(epsilon)) cfg.params.epsilon = epsilon;
    if (!std::isnan(theta)) cfg.params.theta = theta;
    if (!std::isnan(beta)) cfg.params.beta = beta;
    if (!std::isnan(t)) cfg.t = t;
    cfg.params.validate();
    if (!(cfg.t > 0.0)) throw DomainError("--t must be positive");
  }
};

Axis parse_axis(const std::string& s) {
  if (s == "temporal") return Axis::Temporal;
  if (s == "spatial") return Axis::Spatial;
  throw DomainError("axis must be temporal or spatial");
}

Field parse_field(const std::string& s) {
  if (s == "base") return Field::Base;
  if (s == "gradient") return Field::Gradient;
  throw DomainError("field must be base or gradient");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double x = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') throw DomainError("bad number '" + cell + "' in list");
    v.push_back(x);
  }
  return v;
}

void emit(const std::string& text, const std::string& file) {
  if (file.empty()) {
    std::cout << text;
  } else {
    if (const auto dir = fs::path(file).parent_path(); !dir.empty()) fs::create_directories(dir);
    write_file(file, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spdelab: kernels, spectral densities, covariances, sampling and moduli statistics"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  std::vector<std::string> only;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s, seed_set = true; }, "base seed");
  app.add_option("--out", out_dir, "output directory (manifests, verify report)");
  app.add_option("--threads", threads, "worker threads (default: SPDELAB_THREADS or hardware)");
  app.add_option("--only", only, "criteria ids or module names for verify")->delimiter(',');

  ModelOpts model;

  // specfun eval
  auto* specfun = app.add_subcommand("specfun", "special functions");
  auto* sf_eval = specfun->add_subcommand("eval", "E_beta(x) and its bracket for x < 0");
  double sf_beta = 0.5, sf_x = -1.0;
  sf_eval->add_option("--beta", sf_beta, "order of E_beta")->required();
  sf_eval->add_option("--x", sf_x, "argument z of E_beta(z)")->required();
  specfun->require_subcommand(1);

  // kernel eval
  auto* kernel = app.add_subcommand("kernel", "fundamental kernels");
  auto* k_eval = kernel->add_subcommand("eval", "kernel value at radius r, or its transform at |xi| = r with --ft");
  std::string k_r;
  bool k_ft = false;
  model.add(k_eval);
  k_eval->add_option("--r", k_r, "comma-separated radii (frequencies with --ft)")->required();
  k_eval->add_flag("--ft", k_ft, "evaluate the Fourier transform");
  kernel->require_subcommand(1);

  // spectral
  auto* spectral = app.add_subcommand("spectral", "spectral densities");
  spectral->require_subcommand(1);
  std::string sp_axis = "temporal", sp_field = "base", sp_logpow = "auto";
  std::string sp_freq, sp_lag;
  double sp_lo = 1e2, sp_hi = 1e6;
  int sp_points = 40;
  auto* sp_eval = spectral->add_subcommand("eval", "density value");
  auto* sp_var = spectral->add_subcommand("variogram", "variogram at a lag");
  auto* sp_asym = spectral->add_subcommand("asymptote", "log-log tail fit");
  for (auto* s : {sp_eval, sp_var, sp_asym}) {
    model.add(s);
    s->add_option("--axis", sp_axis, "temporal or spatial");
    s->add_option("--field", sp_field, "base or gradient");
  }
  sp_eval->add_option("--freq", sp_freq, "comma-separated frequencies")->required();
  sp_var->add_option("--lag", sp_lag, "comma-separated lags")->required();
  sp_asym->add_option("--lo", sp_lo);
  sp_asym->add_option("--hi", sp_hi);
  sp_asym->add_option("--points", sp_points);
  sp_asym->add_option("--logpower", sp_logpow, "auto, include or exclude");

  // cov
  auto* cov = app.add_subcommand("cov", "covariances");
  cov->require_subcommand(1);
  double cv_t = 1.0, cv_s = 0.5;
  std::string cv_points = "", cv_file;
  auto* cv_eval = cov->add_subcommand("eval", "temporal covariance at (t, s)");
  auto* cv_matrix = cov->add_subcommand("matrix", "temporal covariance matrix as CSV");
  auto* cv_fit = cov->add_subcommand("fit", "bifBM fit of the temporal covariance on a grid");
  auto* cv_slnd = cov->add_subcommand("slnd", "SLND check of the spatial covariance");
  for (auto* s : {cv_eval, cv_matrix, cv_fit, cv_slnd}) model.add(s);
  cv_eval->add_option("--t1", cv_t, "first time")->required();
  cv_eval->add_option("--t2", cv_s, "second time")->required();
  for (auto* s : {cv_matrix, cv_fit}) {
    s->add_option("--points", cv_points, "comma-separated times (default i/20, i=1..20)");
    s->add_option("--file", cv_file, "output CSV (default stdout)");
  }
  int sl_trials = 1000, sl_nmax = 8;
  bool sl_log = false;
  cv_slnd->add_option("--trials", sl_trials);
  cv_slnd->add_option("--nmax", sl_nmax);
  cv_slnd->add_flag("--phi-log", sl_log, "phi(r) = r log(1/r)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "replicated sample paths as CSV");
  std::string sim_target = "lks-time", sim_method = "spectral", sim_out;
  std::size_t sim_points = 0, sim_replicas = 0;
  double sim_spacing = 0.0;
  model.add(sim);
  sim->add_option("--target", sim_target,
                  "lks-time, tf-time, lks-space, tf-space, gradient-lks-time, gradient-tf-time, gradient-lks-space, "
                  "gradient-tf-space, bm");
  sim->add_option("--method", sim_method, "cholesky or spectral");
  sim->add_option("--grid", sim_points, "number of grid points");
  sim->add_option("--spacing", sim_spacing, "grid spacing");
  sim->add_option("--replicas", sim_replicas);
  sim->add_option("--out", sim_out, "paths CSV (default stdout)");

  // moduli
  auto* mod = app.add_subcommand("moduli", "modulus statistics of simulated paths");
  std::string md_paths, md_mode = "uniform", md_deltas, md_out;
  double md_H = 0.5, md_lp = 0.0, md_llp = 0.0, md_lo = NAN, md_hi = NAN, md_t0 = NAN;
  mod->add_option("--paths", md_paths, "paths CSV from simulate")->required();
  mod->add_option("--mode", md_mode, "uniform, local or chung");
  mod->add_option("--H", md_H);
  mod->add_option("--logpow", md_lp);
  mod->add_option("--loglogpow", md_llp, "Chung mode: power on loglog (default -H)");
  mod->add_option("--deltas", md_deltas, "comma-separated decreasing deltas (default: 8 dyadic levels)");
  mod->add_option("--lo", md_lo, "uniform: interval start");
  mod->add_option("--hi", md_hi, "uniform: interval end");
  mod->add_option("--t0", md_t0, "local: interior point");
  mod->add_option("--out", md_out, "report CSV (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  bool allow_documented = false;
  verify->add_flag("--allow-documented", allow_documented,
                   "exit 0 when every failure is a documented, unattainable target");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed_set) cfg.seeds = {seed};
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!only.empty()) cfg.only = only;
    if (threads > 0) set_thread_count(threads);
    const std::vector<std::string> args(argv, argv + argc);
    std::string manifest_path;
    auto write_manifest = [&](const std::string& name, const std::vector<ManifestEntry>& extra = {}) {
      const fs::path p = manifest_path.empty() ? fs::path(cfg.output_dir) / (name + ".manifest.json")
                                               : fs::path(manifest_path);
      if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
      write_file(p.string(), manifest_json(cfg, args, cfg.seeds, extra));
    };

    if (sf_eval->parsed()) {
      cfg.command = "specfun";
      std::cout << format_double(mittag_leffler(sf_beta, sf_x)) << "\n";
      if (sf_x < 0.0) {
        const auto b = ml_bounds(sf_beta, -sf_x);
        std::cout << "bracket " << format_double(b.lower) << " " << format_double(b.upper) << "\n";
      }
      write_manifest("specfun");
    } else if (k_eval->parsed()) {
      cfg.command = "kernel";
      model.apply(cfg);
      const auto& p = cfg.params;
      std::vector<std::vector<double>> rows;
      for (double r : parse_list(k_r)) {
        double v;
        if (k_ft) v = p.family == Family::LKS ? lks_kernel_ft(p, cfg.t, r) : tf_kernel_ft(p, cfg.t, r);
        else v = p.family == Family::LKS ? lks_kernel(p, cfg.t, r) : tf_kernel(p, cfg.t, r);
        rows.push_back({cfg.t, r, v});
      }
      std::cout << to_csv({"t", k_ft ? "xi" : "r", "value"}, rows);
      write_manifest("kernel");
    } else if (spectral->parsed()) {
      cfg.command = "spectral";
      model.apply(cfg);
      SpectralDensity sd;
      sd.axis = parse_axis(sp_axis);
      sd.field = parse_field(sp_field);
      sd.params = cfg.params;
      sd.t_fixed = cfg.t;
      if (sp_eval->parsed()) {
        std::vector<std::vector<double>> rows;
        for (double f : parse_list(sp_freq)) rows.push_back({f, eval_sd(sd, f)});
        std::cout << to_csv({"freq", "value"}, rows);
      } else if (sp_var->parsed()) {
        std::vector<std::vector<double>> rows;
        for (double h : parse_list(sp_lag))
          rows.push_back({h, sd.axis == Axis::Temporal ? temporal_variogram(sd, h) : spatial_variogram(sd, h)});
        std::cout << to_csv({"lag", "value"}, rows);
      } else {
        LogPowerMode m = sp_logpow == "include"   ? LogPowerMode::Include
                         : sp_logpow == "exclude" ? LogPowerMode::Exclude
                                                  : LogPowerMode::Auto;
        if (sp_logpow != "auto" && sp_logpow != "include" && sp_logpow != "exclude")
          throw DomainError("--logpower must be auto, include or exclude");
        const auto r = fit_asymptote(sd, {sp_lo, sp_hi, sp_points}, m);
        std::cout << to_csv({"exponent", "log_power", "constant", "residual", "condition"},
                            {{r.fitted_exponent, r.fitted_log_power, r.fitted_constant, r.residual, r.condition}});
      }
      write_manifest("spectral");
    } else if (cov->parsed()) {
      cfg.command = "cov";
      model.apply(cfg);
      const auto p = cfg.params;
      CovFn f = [p](double t, double s) {
        return p.family == Family::LKS ? lks_temporal_cov(p, t, s) : tf_temporal_cov(p, t, s);
      };
      std::vector<double> pts;
      if (cv_points.empty())
        for (int i = 1; i <= 20; ++i) pts.push_back(i / 20.0);
      else
        pts = parse_list(cv_points);
      if (cv_eval->parsed()) {
        std::cout << format_double(f(cv_t, cv_s)) << "\n";
      } else if (cv_matrix->parsed()) {
        const auto m = build_cov_matrix(f, pts);
        std::vector<std::string> header;
        for (double x : pts) header.push_back(format_double(x));
        std::vector<std::vector<double>> rows;
        for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
          std::vector<double> r(m.entries.cols());
          for (Eigen::Index j = 0; j < m.entries.cols(); ++j) r[j] = m.entries(i, j);
          rows.push_back(r);
        }
        emit(to_csv(header, rows), cv_file);
      } else if (cv_fit->parsed()) {
        const auto r = bifbm_fit(f, pts);
        emit(to_csv({"H", "K", "scale", "residual", "converged_starts"},
                    {{r.params.H, r.params.K, r.params.scale, r.residual, static_cast<double>(r.converged_starts)}}),
             cv_file);
      } else {
        SpectralDensity sd;
        sd.axis = Axis::Spatial;
        sd.params = p;
        sd.t_fixed = cfg.t;
        const auto sc = tabulate_spatial_cov(sd, 1e-5, 1.0);
        SlndOptions o;
        o.dim = p.dim;
        o.trials = sl_trials;
        o.n_max = sl_nmax;
        o.phi_log = sl_log;
        o.seed = cfg.seeds.front();
        const auto r = slnd_check(sc, o);
        std::cout << to_csv({"c_min", "kappa", "normalized", "worst_trial", "worst_n", "pass"},
                            {{r.c_min, r.kappa, r.normalized, static_cast<double>(r.worst_trial),
                              static_cast<double>(r.worst_n), r.pass ? 1.0 : 0.0}});
      }
      write_manifest("cov");
    } else if (sim->parsed()) {
      cfg.command = "simulate";
      model.apply(cfg);
      const std::size_t replicas = sim_replicas ? sim_replicas : cfg.replicas;
      const bool space = sim_target.find("space") != std::string::npos;
      const GridSpec gdef = cfg.grids.count(space ? "space" : "time") ? cfg.grids.at(space ? "space" : "time")
                                                                       : GridSpec{0.0, 1.0 / 1024.0, 1025};
      const std::size_t n = sim_points ? sim_points : gdef.points;
      const double h = sim_spacing > 0.0 ? sim_spacing : gdef.spacing;
      if (n < 2 || !(h > 0.0)) throw DomainError("simulate: need at least 2 grid points and a positive spacing");
      // Echo what was actually run so the manifest reproduces it.
      cfg.replicas = replicas;
      cfg.grids[space ? "space" : "time"] = GridSpec{space ? 0.0 : gdef.start, h, n};
      const std::uint64_t s0 = cfg.seeds.front();
      SamplePathSet out;
      if (sim_target == "bm") {
        out = sample_brownian(n - 1, h * static_cast<double>(n - 1), replicas, s0);
      } else {
        SpectralDensity sd;
        sd.axis = space ? Axis::Spatial : Axis::Temporal;
        sd.field = sim_target.rfind("gradient-", 0) == 0 ? Field::Gradient : Field::Base;
        const std::string fam = sim_target.substr(sd.field == Field::Gradient ? 9 : 0, 2);
        if (fam == "lk") cfg.params.family = Family::LKS;
        else if (fam == "tf") cfg.params.family = Family::TF;
        else throw DomainError("unknown --target " + sim_target);
        sd.params = cfg.params;
        sd.t_fixed = cfg.t;
        sd.validate();
        if (sim_method == "spectral") {
          const UniformGrid g{space ? 0.0 : gdef.start, h, n};
          out = space ? sample_spectral_stationary(sd, g, replicas, s0)
                      : sample_spectral_stat_increments(sd, g, replicas, s0);
        } else if (sim_method == "cholesky") {
          if (sd.field == Field::Gradient) throw DomainError("cholesky sampling covers the base processes only");
          const auto p = cfg.params;
          std::vector<double> pts = UniformGrid{space ? 0.0 : gdef.start, h, n}.coords();
          CovFn f;
          if (space) {
            const auto sc = tabulate_spatial_cov(sd, std::max(1e-6, 0.5 * h), std::max(1.0, 2.0 * h * n));
            f = [sc](double x, double y) { return sc.variance - 0.5 * sc.variogram(std::fabs(x - y)); };
          } else {
            if (pts.front() == 0.0) pts.erase(pts.begin());  // U(0) = 0
            f = [p](double t, double s) {
              return p.family == Family::LKS ? lks_temporal_cov(p, t, s) : tf_temporal_cov(p, t, s);
            };
          }
          auto m = build_cov_matrix(f, pts);
          apply_jitter(m);
          out = sample_cholesky(m, replicas, s0, sd.describe());
        } else {
          throw DomainError("--method must be cholesky or spectral");
        }
      }
      emit(paths_to_csv(out), sim_out);
      if (!sim_out.empty()) manifest_path = sim_out + ".manifest.json";
      std::vector<ManifestEntry> extra{{"method", method_name(out.method)}, {"target", sim_target},
                                       {"params", out.params}};
      for (const auto& [k, v] : out.diagnostics) extra.push_back({k, format_double(v)});
      write_manifest("simulate", extra);
    } else if (mod->parsed()) {
      cfg.command = "moduli";
      const auto paths = paths_from_csv(read_file(md_paths));
      const double dt = paths.grid[1] - paths.grid[0];
      std::vector<double> deltas;
      if (md_deltas.empty()) {
        // Dyadic levels from 10 spacings up, the largest at most a quarter of the span.
        const double span = paths.grid.back() - paths.grid.front();
        int levels = 8;
        while (levels > 3 && default_deltas(dt, levels).front() > span / 4.0) --levels;
        deltas = default_deltas(dt, levels);
      } else {
        deltas = parse_list(md_deltas);
      }
      const auto mode = parse_mode(md_mode);
      ModulusReport r;
      if (mode == ModulusMode::Uniform) {
        r = uniform_modulus_stat(paths, {md_H, md_lp, md_llp, mode}, std::isnan(md_lo) ? paths.grid.front() : md_lo,
                                 std::isnan(md_hi) ? paths.grid.back() : md_hi, deltas);
      } else if (mode == ModulusMode::Local) {
        const double t0 = std::isnan(md_t0) ? 0.5 * (paths.grid.front() + paths.grid.back()) : md_t0;
        r = local_modulus_stat(paths, {md_H, md_lp, md_llp, mode}, t0, deltas);
      } else {
        r = chung_stat(paths, md_H, deltas, md_llp == 0.0 ? -md_H : md_llp);
      }
      emit(report_to_csv(r), md_out);
      if (!md_out.empty()) manifest_path = md_out + ".manifest.json";
      write_manifest("moduli", {{"mode", mode_name(mode)}, {"notes", r.notes}, {"paths", md_paths}});
    } else if (verify->parsed()) {
      cfg.command = "verify";
      const auto reps = run_acceptance(cfg, std::cout);
      fs::create_directories(cfg.output_dir);
      write_file((fs::path(cfg.output_dir) / "verify_report.csv").string(), acceptance_csv(reps));
      write_manifest("verify");
      bool ok = true, documented_only = true;
      for (const auto& r : reps) {
        if (!r.passed()) ok = false;
        if (!r.passed() && !r.only_known_failures()) documented_only = false;
      }
      std::cout << "verify: " << (ok ? "all criteria passed" : "some criteria failed") << "\n";
      if (!ok) return allow_documented && documented_only ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
