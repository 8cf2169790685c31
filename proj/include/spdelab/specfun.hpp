#pragma once

#include <stdexcept>
#include <utility>

namespace spdelab {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

struct MLEvalPolicy {
  double series_cutoff = 5.0;      // |x| below which the power series is tried
  int series_terms_max = 10000;
  double asymptotic_cutoff = 50.0; // -x above which the inverse-power expansion is tried
  double target_rel_tol = 1e-14;
  bool clamp_to_bounds = true;     // off: return the raw branch value (used to audit the bracket)

  void validate() const;
};

double gamma_fn(double x);

// 1/Γ(z); zero at the poles.
double reciprocal_gamma(double z);

// exp(x^2) erfc(x) without overflow or underflow.
double erfcx(double x);

// ∫_x^∞ e^{-u^2/2} du / e^{-x^2/2}
double mills_ratio(double x);

double mittag_leffler(double beta, double x, const MLEvalPolicy& policy = {});

struct MLBounds {
  double lower, upper;
};
// Bracket for E_β(-x), x > 0, 0 < β < 1.
MLBounds ml_bounds(double beta, double x);

// Gauss hypergeometric series; z in (-1, 1], z = 1 by Gauss summation.
double hyp2F1(double a, double b, double c, double z, double rel_tol = 1e-15, int max_terms = 10000);

namespace detail {
// Evaluation branches, exposed for testing. Each returns false when the
// branch cannot certify the requested accuracy.
bool ml_series(double beta, double x, const MLEvalPolicy& p, double& out);
bool ml_asymptotic(double beta, double y, const MLEvalPolicy& p, double& out);
double ml_integral(double beta, double y, double rel_tol);
}  // namespace detail

}  // namespace spdelab
