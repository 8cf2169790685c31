#pragma once

#include <string>
#include <vector>

namespace spdelab {

enum class Family { LKS, TF };

struct ModelParams {
  Family family = Family::LKS;
  double epsilon = 1.0;  // LKS only
  double theta = 0.0;    // LKS only
  double beta = 0.5;     // TF only
  int dim = 1;

  void validate() const;
  static ModelParams lks(double eps, double theta, int dim);
  static ModelParams tf(double beta, int dim);
  std::string describe() const;
};

// Spatial Fourier transforms, convention (2π)^{-d/2}∫ f(x) e^{-i<ξ,x>} dx.
double lks_kernel_ft(const ModelParams& p, double t, double xi_norm);
double tf_kernel_ft(const ModelParams& p, double t, double xi_norm);

// Two normalisations of the β=1/2 kernel transform: inner Brownian motion with
// generator Δ (exponent t|ξ|^4/4, the default) or standard Brownian motions.
enum class BtbmConvention { Scaled, Standard };
double btbm_ft(double t, double xi_norm, int d, BtbmConvention c = BtbmConvention::Scaled);

// Real-space kernels as radial inverse transforms.
double lks_kernel(const ModelParams& p, double t, double r);
double tf_kernel(const ModelParams& p, double t, double r);

// β = 1/2 kernel from the Brownian-time subordination integral.
double btbm_kernel_subordination(double t, double r, int d);

// Periodic convolution of gridded initial data with the kernel, computed with
// the exact transform at the grid frequencies. Grid: n^d points, spacing dx,
// row-major. Warnings (coarse grid) are appended to diagnostics.
std::vector<double> apply_initial_data(const ModelParams& p, double t, const std::vector<double>& u0, int n,
                                       double dx, std::vector<std::string>* diagnostics = nullptr);

}  // namespace spdelab
