#pragma once

#include <functional>
#include <string>

#include "spdelab/kernels.hpp"

namespace spdelab {

enum class Axis { Temporal, Spatial };
enum class Field { Base, Gradient };

struct SpectralDensity {
  Axis axis = Axis::Temporal;
  Field field = Field::Base;
  ModelParams params{};
  double t_fixed = 1.0;  // spatial densities only

  void validate() const;
  std::string describe() const;
  // β outside {1/2^k}: formula used beyond the range where the Fourier identity is proved
  bool extended_regime() const;
};

// Temporal: Δ(τ) for the auxiliary stationary-increment process (or its
// gradient). Spatial: S(ξ) of the stationary field U(t,·) (or ∂xU).
double eval_sd(const SpectralDensity& sd, double freq);

// Same density as a reusable callable; constants that do not depend on the
// frequency are computed once.
std::function<double(double)> density_function(const SpectralDensity& sd);

// E[X(t+lag) - X(t)]^2 = (1/π) ∫_R (1 - cos(lag τ)) Δ(τ) dτ
double temporal_variogram(const SpectralDensity& sd, double lag);

// E[U(t,x+h) - U(t,x)]^2 = 2 ∫_{R^d} (1 - cos<h,ξ>) S(ξ) dξ
double spatial_variogram(const SpectralDensity& sd, double h);

// ∫_{R^d} S(ξ) dξ, the one-point variance of the spatial field.
double spatial_variance(const SpectralDensity& sd);

// Hölder index of the process behind a temporal density.
double temporal_hurst(const SpectralDensity& sd);

struct FitWindow {
  double lo = 1e2;
  double hi = 1e6;
  int points = 40;
};

enum class LogPowerMode { Auto, Include, Exclude };

struct AsymptoteReport {
  double fitted_exponent = 0.0;   // slope in log-log, e.g. -4
  double fitted_log_power = 0.0;  // power on log(freq); 0 when not fitted
  double fitted_constant = 0.0;
  FitWindow fit_window{};
  double residual = 0.0;          // rms of log residuals
  double condition = 0.0;         // of the standardised design
  bool log_power_fitted = false;
};

AsymptoteReport fit_asymptote(const SpectralDensity& sd, const FitWindow& w = {},
                              LogPowerMode mode = LogPowerMode::Auto);

// R_β(U) = ∫_0^1 E_β(-U w^β)^2 dw, the shape of the fractional spatial
// density S_β(ξ) = (2π)^{-d} t R_β(|ξ|^2 t^β / 2): by direct quadrature and
// from the cached table used by eval_sd.
double tf_spatial_R_direct(double beta, double U);
double tf_spatial_R(double beta, double U);

// Closed-form constants of the leading power laws.
// LKS, ϑ=0: Δ(τ) = C τ^{-(2-d/4)}, C = (2π)^{-d} ∫ dξ / (1 + ε^2 |ξ|^8 / 64).
double lks_temporal_constant(double eps, int d);
// TF: Δ_β(τ) = C τ^{-(2-βd/2)}, C = (2π)^{-d} ∫ dξ / (1 + |ξ|^2 cos(πβ/2) + |ξ|^4/4).
double tf_temporal_constant(double beta, int d);
// LKS spatial: S(ξ) ~ 4 / (ε (2π)^d) |ξ|^{-4}.
double lks_spatial_tail_constant(double eps, int d);
// TF spatial, β < 1/2: S_β(ξ) ~ 4 t^{1-2β} / (Γ(1-β)^2 (2π)^d (1-2β)) |ξ|^{-4}.
double tf_spatial_tail_constant(double beta, double t, int d);

}  // namespace spdelab
