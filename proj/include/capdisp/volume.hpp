#pragma once

#include <string>
#include <vector>

namespace capdisp {

// Normalized volume of a spherical cap of geodesic radius phi on S^d:
//   V(phi) = integral_0^phi sin^{d-1} t dt / (2 integral_0^{pi/2} sin^{d-1} t dt).
// Evaluated through the regularized incomplete beta function (substitution
// s = sin^2 t), with the complement identity for phi > pi/2. Absolute
// accuracy 1e-12.
double cap_volume(int d, double phi);

// Independent evaluation path (adaptive quadrature of the sine-power
// integrals); used as a cross-check against the beta path.
double cap_volume_quadrature(int d, double phi);

// phi with |V(phi) - gamma| <= 1e-11; bisection (certified by monotonicity)
// plus a Newton polish.
double inverse_cap_volume(int d, double gamma);

// Wallis integral: integral_0^{pi/2} sin^{d-1} t dt, Gamma closed form in
// log-space, accurate to 1e-13. Requires d >= 2.
double wallis_integral(int d);

// (1 / sqrt(2 pi)) integral_alpha^inf e^{-x^2/2} dx, via erfc.
double gaussian_tail(double alpha);

// Regularized incomplete beta I_x(a, b). one_minus_x may be supplied when it
// is known more accurately than 1 - x (e.g. cos^2 phi for x = sin^2 phi).
double reg_inc_beta(double a, double b, double x, double one_minus_x);

// Per-dimension evaluator caching the normalizing constant.
class VolumeFn {
 public:
  explicit VolumeFn(int d);
  int dim() const { return d_; }
  double operator()(double phi) const;
  double inverse(double gamma) const;
  double density(double phi) const;  // dV/dphi = sin^{d-1}(phi) / (2 W)
  double normalizer() const { return half_norm_; }

 private:
  int d_;
  double half_norm_;  // integral_0^{pi/2} sin^{d-1}
};

// One inequality check at one grid point (or ordered pair of grid points).
struct VolumeBoundCheck {
  std::string name;
  double x = 0.0;       // phi, alpha, or the smaller radius of a pair
  double x2 = 0.0;      // the larger radius for pair inequalities, else NaN
  double lower = 0.0;   // -inf when the inequality is one-sided
  double upper = 0.0;   // +inf when the inequality is one-sided
  double value = 0.0;
  double margin = 0.0;  // min slack; negative means violated
  bool applicable = false;
  bool holds = false;
  std::string note;
};

struct VolumeBoundsReport {
  int d = 0;
  std::vector<VolumeBoundCheck> checks;
  int evaluated = 0;
  int skipped = 0;
  int violations = 0;
  bool all_hold() const { return violations == 0; }
};

// Evaluates the cap-volume inequality families (power-of-sine sandwich, the
// secant-corrected sandwich below the arccos(1/sqrt(d+1)) threshold, the
// equatorial band constants, the near-hemisphere sandwich, the radius-ratio
// power bound) plus the two sine-integral facts, over the given radius grid.
// Grid points outside an inequality's domain are reported as skipped.
VolumeBoundsReport check_volume_bounds(int d, const std::vector<double>& grid);

}  // namespace capdisp
