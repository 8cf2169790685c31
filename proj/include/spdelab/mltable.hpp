// Fast E_β(-y), y >= 0, for repeated use at fixed β: short power series near
// zero, piecewise Chebyshev interpolation in log y, inverse-power expansion in
// the tail. Every piece is fitted against mittag_leffler().
#pragma once

#include <memory>
#include <vector>

namespace spdelab {

class MLTable {
 public:
  explicit MLTable(double beta);

  double beta() const { return beta_; }
  double operator()(double y) const;
  double y_lo() const { return y_lo_; }
  double y_hi() const { return y_hi_; }

  // shared instance per β, built on first use
  static std::shared_ptr<const MLTable> get(double beta);

 private:
  double beta_, g1m_;  // Γ(1-β)
  double y_lo_, y_hi_, v_lo_, width_;
  int degree_ = 20;
  std::vector<double> series_;  // 1/Γ(1+βk)
  std::vector<double> asym_;    // (-1)^{m+1}/Γ(1-βm), m >= 1
  std::vector<double> cheb_;    // panels × (degree+1) coefficients
  int panels_ = 0;
};

}  // namespace spdelab
