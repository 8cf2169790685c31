// ∫_{R^d} g(|ξ|) e^{i<ξ,x>} dξ for radial g, reduced to one dimension:
//   d=1: 2∫ g cos(ρr) dρ,  d=2: 2π∫ g J0(ρr) ρ dρ,  d=3: 4π∫ g sin(ρr)/(ρr) ρ² dρ.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "spdelab/quadrature.hpp"

namespace spdelab {

// k-th positive zero of J0 (k >= 1): McMahon start, Newton polish.
inline double bessel_j0_zero(int k) {
  const double b = (k - 0.25) * std::numbers::pi;
  double x = b + 1.0 / (8.0 * b) - 124.0 / (3.0 * std::pow(8.0 * b, 3));
  for (int it = 0; it < 6; ++it) {
    const double j0 = std::cyl_bessel_j(0.0, x), j1 = std::cyl_bessel_j(1.0, x);
    const double dx = j0 / j1;  // J0' = -J1
    x += dx;
    if (std::fabs(dx) < 1e-15 * x) break;
  }
  return x;
}

inline double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw std::domain_error("dimension must be 1, 2 or 3");
  }
}

struct RadialSpec {
  double rho_max = std::numeric_limits<double>::infinity();  // g negligible beyond
  std::vector<double> breaks;                                // knees of g
  quad::Options opt{};
};

namespace detail {
inline double radial_weight(int d, double x) {
  // angular factor at x = ρ r
  switch (d) {
    case 1: return std::cos(x);
    case 2: return std::cyl_bessel_j(0.0, x);
    default: return x == 0.0 ? 1.0 : std::sin(x) / x;
  }
}
// zeros of the angular factor in x = ρ r: cos at (k+1/2)π, J0 at j_k, sinc at kπ
inline double radial_zero(int d, int k) {
  switch (d) {
    case 1: return (k + 0.5) * std::numbers::pi;
    case 2: return bessel_j0_zero(k + 1);
    default: return (k + 1.0) * std::numbers::pi;
  }
}
}  // namespace detail

template <class G>
quad::Result radial_fourier_integral(G&& g, int d, double r, const RadialSpec& spec) {
  const double omega = unit_sphere_area(d);
  auto integrand = [&](double rho) {
    if (rho == 0.0) return d == 1 ? omega * g(0.0) : 0.0;
    const double gv = g(rho);
    if (gv == 0.0) return 0.0;
    double w = omega * detail::radial_weight(d, rho * r);
    if (d >= 2) w *= rho;
    if (d == 3) w *= rho;
    return gv * w;
  };
  std::vector<double> pts{0.0};
  for (double b : spec.breaks)
    if (b > 0.0 && b < spec.rho_max) pts.push_back(b);
  const bool finite = std::isfinite(spec.rho_max);
  if (r > 0.0) {
    const double reach = finite ? spec.rho_max : (pts.empty() ? 0.0 : *std::max_element(pts.begin(), pts.end()));
    // panel at every zero up to the reach (thinned if there are very many)
    int nz = 0;
    while (detail::radial_zero(d, nz) / r < reach && nz < 200000) ++nz;
    const int stride = std::max(1, nz / 20000);
    for (int k = 0; k < nz; k += stride) pts.push_back(detail::radial_zero(d, k) / r);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (finite) {
    pts.push_back(spec.rho_max);
    return quad::integrate(integrand, pts, spec.opt);
  }
  if (r == 0.0) return quad::integrate_to_inf(integrand, 0.0, spec.opt, pts);
  // finite head up to the next zero, then an extrapolated oscillatory tail
  int k0 = 0;
  while (detail::radial_zero(d, k0) / r <= pts.back()) ++k0;
  const double head_end = detail::radial_zero(d, k0) / r;
  pts.push_back(head_end);
  auto head = quad::integrate(integrand, pts, spec.opt);
  auto tail = quad::integrate_oscillatory(
      integrand, head_end, [&](int k) { return detail::radial_zero(d, k0 + 1 + k) / r; }, spec.opt);
  quad::Result out;
  out.value = head.value + tail.value;
  out.abserr = head.abserr + tail.abserr;
  out.evals = head.evals + tail.evals;
  out.converged = head.converged && tail.converged;
  return out;
}

}  // namespace spdelab
