#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdelab/kernels.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

struct BifBMParams {
  double H = 0.5;
  double K = 1.0;
  double scale = 1.0;
  void validate() const;
};

// scale^2 2^{-K} ((t^{2H} + s^{2H})^K - |t-s|^{2HK})
double bifbm_cov(const BifBMParams& p, double t, double s);

// ∫_{R^d} e^{-|ξ|^4} dξ by radial quadrature.
double quartic_gauss_integral(int d);

// Scale c_d with lks_temporal_cov(ϑ=0) = c_d^2 R^{1/2,(4-d)/4}.
double lks_bifbm_constant(double eps, int d);

// E[U(t,x)U(s,x)] for the LKS field (any ϑ).
double lks_temporal_cov(const ModelParams& p, double t, double s);

// E[U(t,x)U(s,x)] for the fractional field.
double tf_temporal_cov(const ModelParams& p, double t, double s);

// ∫_0^s E_β(-a(t-r)^β) E_β(-a(s-r)^β) dr as a double power series in a.
double tf_inner_series(double beta, double a, double t, double s, int k_max = 200);

// ∫ cos<h,ξ> S(ξ) dξ for a spatial density.
double spatial_cov(const SpectralDensity& sd, double h);

using CovFn = std::function<double(double, double)>;

struct CovMatrix {
  std::vector<double> points;
  Eigen::MatrixXd entries;  // without jitter
  double jitter = 0.0;      // added to the diagonal wherever the matrix is used

  Eigen::MatrixXd jittered() const;
  double max_diag() const;
};

// Symmetric matrix of cov over the points (rows in parallel).
CovMatrix build_cov_matrix(const CovFn& cov, const std::vector<double>& points);

// Smallest jitter from {0, 1e-14, ..., 1e-8}·max diag that makes the matrix
// positive definite; throws when none does.
void apply_jitter(CovMatrix& m);
double min_eigenvalue(const Eigen::MatrixXd& a);

// Var(target | cond) by Schur complement.
double conditional_variance(const CovMatrix& m, int target, const std::vector<int>& cond);
double conditional_variance(const Eigen::MatrixXd& cov, int target, const std::vector<int>& cond);

// Stationary isotropic covariance given by variance and variogram γ(r),
// cov(r) = variance - γ(r)/2.
struct StationaryCov {
  double variance = 0.0;
  std::function<double(double)> variogram;
};

// Variogram of a spatial density tabulated on [r_min, r_max] (monotone cubic
// in log-log), power-law extension below r_min.
StationaryCov tabulate_spatial_cov(const SpectralDensity& sd, double r_min, double r_max, int points = 320);

struct SlndOptions {
  int dim = 3;
  int n_max = 8;
  int trials = 1000;
  double exponent = 1.0;  // φ(r) = r^exponent, times log(1/r) when phi_log
  bool phi_log = false;
  double box = 0.25;      // configurations live in [0, box]^dim
  double min_dist = 1e-4;
  std::uint64_t seed = 1;
};

struct SlndReport {
  double c_min = 0.0;       // min over trials of Var(x | y_1..y_n) / min_j φ(|x - y_j|)
  double kappa = 0.0;       // γ(box) / (2 φ(box)), the natural scale of the ratio
  double normalized = 0.0;  // c_min / kappa
  int worst_trial = -1;
  int worst_n = -1;
  bool pass = false;        // normalized >= 1e-2
};

double slnd_phi(double r, double exponent, bool phi_log);
SlndReport slnd_check(const StationaryCov& cov, const SlndOptions& opt);

struct BifbmFitResult {
  BifBMParams params;
  double residual = 0.0;  // ||C - scale^2 R||_F / ||C||_F
  int best_start = -1;
  int converged_starts = 0;
  std::vector<std::string> diagnostics;
};

// Least-squares bifBM fit over grid × grid: 5×5 (H,K) starts, scale in
// closed form, Nelder-Mead refinement.
BifbmFitResult bifbm_fit(const CovFn& cov, const std::vector<double>& grid);
BifbmFitResult bifbm_fit(const Eigen::MatrixXd& c, const std::vector<double>& grid);

}  // namespace spdelab
