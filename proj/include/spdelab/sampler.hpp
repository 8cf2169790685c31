// Replicated Gaussian sample paths: exact Cholesky sampling on small grids,
// FFT synthesis for stationary spatial fields and harmonic synthesis for
// stationary-increment temporal processes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdelab/covariance.hpp"
#include "spdelab/spectral.hpp"

namespace spdelab {

enum class SampleMethod { Cholesky, Spectral };

struct SamplePathSet {
  std::vector<double> grid;
  std::size_t replicas = 0;
  std::vector<double> values;  // replica-major, replicas × grid.size()
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::Cholesky;
  std::string params;  // description of the target
  std::vector<std::pair<std::string, double>> diagnostics;

  std::size_t points() const { return grid.size(); }
  const double* row(std::size_t r) const { return values.data() + r * grid.size(); }
  double* row(std::size_t r) { return values.data() + r * grid.size(); }
};

std::string method_name(SampleMethod m);

// x = L z with L the Cholesky factor of the jittered matrix.
SamplePathSet sample_cholesky(const CovMatrix& m, std::size_t replicas, std::uint64_t seed,
                              const std::string& params = "");

// Brownian motion on t_i = i·T/n, i = 0..n, as cumulative sums of independent
// increments. This is the Cholesky construction for min(s,t) on that grid.
SamplePathSet sample_brownian(std::size_t n, double T, std::size_t replicas, std::uint64_t seed);

struct UniformGrid {
  double start = 0.0;
  double spacing = 1.0;
  std::size_t points = 0;

  std::vector<double> coords() const;
  double span() const { return spacing * static_cast<double>(points - 1); }
};

struct StationaryOptions {
  int oversample = 4;          // periodic FFT length / grid length
  double decay_ratio = 1e-6;   // Nyquist must lie past S(ξ) < ratio·peak
  int fold_images = 16;        // aliased images summed explicitly; -1 disables folding
};

// 1-D trace of the spatial density along a line: the density itself for
// d=1, otherwise ∫ S(√(ξ^2+|η|^2)) dη over the orthogonal directions.
double line_density(const SpectralDensity& sd, double xi);

// Periodic FFT synthesis of the stationary field x ↦ U(t,x) (or its
// gradient) along a uniform grid.
SamplePathSet sample_spectral_stationary(const SpectralDensity& sd, const UniformGrid& grid, std::size_t replicas,
                                         std::uint64_t seed, const StationaryOptions& opt = {});

struct IncrementOptions {
  std::size_t bins = 1u << 14;
  double tau_min = 0.0;  // 0: 1/(100·span)
  double tau_max = 0.0;  // 0: 100/spacing
  std::size_t reseed_every = 64;
  bool nugget = true;    // add the variance beyond tau_max as iid noise
};

// X(t) = Σ_k a_k[(cos tτ_k − 1)ξ_k + sin tτ_k η_k] + n(t) − n(0) on a uniform
// grid starting at 0, with log-uniform bins and a_k = √(Δ(τ_k) w_k / π).
SamplePathSet sample_spectral_stat_increments(const SpectralDensity& sd, const UniformGrid& grid,
                                              std::size_t replicas, std::uint64_t seed,
                                              const IncrementOptions& opt = {});

}  // namespace spdelab
