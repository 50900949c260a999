#include "capdisp/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "capdisp/quadrature.hpp"

namespace capdisp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  const int max_iter = 500;
  const double eps = 3e-16;
  const double fpmin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// Wallis integral for any d >= 1 (the public entry point restricts to d >= 2).
double wallis_any(int d) {
  return std::exp(0.5 * std::log(kPi) - std::log(2.0) +
                  std::lgamma(0.5 * d) - std::lgamma(0.5 * (d + 1)));
}

double sin_power_integral(int d, double a, double b) {
  return adaptive_simpson(
      [d](double t) { return std::pow(std::sin(t), d - 1); }, a, b, 1e-14);
}

void require_dim(int d) {
  if (d < 1) throw std::invalid_argument("cap volume requires dimension d >= 1");
}

double clamp_radius(double phi, const char* what) {
  if (!std::isfinite(phi) || phi < -1e-12 || phi > kPi + 1e-12)
    throw std::domain_error(std::string(what) + ": radius must lie in [0, pi]");
  return std::clamp(phi, 0.0, kPi);
}

}  // namespace

double reg_inc_beta(double a, double b, double x, double one_minus_x) {
  if (x <= 0.0) return 0.0;
  if (one_minus_x <= 0.0) return 1.0;
  // x and 1-x arrive separately so that values within one ulp of an endpoint
  // keep full precision (x = sin^2 rounds to 1.0 while 1-x = cos^2 still
  // carries ~16 digits). Take each log from whichever form is accurate.
  const double ln_x = x < 0.5 ? std::log(x) : std::log1p(-one_minus_x);
  const double ln_1mx =
      one_minus_x < 0.5 ? std::log(one_minus_x) : std::log1p(-x);
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * ln_x + b * ln_1mx;
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, one_minus_x) / b;
}

double cap_volume(int d, double phi) {
  require_dim(d);
  phi = clamp_radius(phi, "cap_volume");
  if (phi <= 0.0) return 0.0;
  if (phi >= kPi) return 1.0;
  if (d == 1) return phi / kPi;
  if (phi > 0.5 * kPi) return 1.0 - cap_volume(d, kPi - phi);
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  return 0.5 * reg_inc_beta(0.5 * d, 0.5, s * s, c * c);
}

double cap_volume_quadrature(int d, double phi) {
  require_dim(d);
  phi = clamp_radius(phi, "cap_volume_quadrature");
  if (phi <= 0.0) return 0.0;
  const double denom = 2.0 * sin_power_integral(d, 0.0, 0.5 * kPi);
  return sin_power_integral(d, 0.0, phi) / denom;
}

double inverse_cap_volume(int d, double gamma) {
  require_dim(d);
  if (!std::isfinite(gamma) || gamma < -1e-12 || gamma > 1.0 + 1e-12)
    throw std::domain_error("inverse_cap_volume: target volume must lie in [0, 1]");
  gamma = std::clamp(gamma, 0.0, 1.0);
  if (gamma <= 0.0) return 0.0;
  if (gamma >= 1.0) return kPi;
  if (d == 1) return gamma * kPi;

  double lo = 0.0;
  double hi = kPi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cap_volume(d, mid) < gamma)
      lo = mid;
    else
      hi = mid;
  }
  double phi = 0.5 * (lo + hi);

  // Newton polish; the bisection bracket already certifies the root.
  const double denom = 2.0 * wallis_any(d);
  for (int it = 0; it < 4; ++it) {
    const double f = cap_volume(d, phi) - gamma;
    const double df = std::pow(std::sin(phi), d - 1) / denom;
    if (!(df > 1e-300)) break;
    const double step = f / df;
    const double next = std::clamp(phi - step, lo, hi);
    if (next == phi) break;
    phi = next;
  }
  return phi;
}

double wallis_integral(int d) {
  if (d < 2) throw std::domain_error("wallis_integral requires d >= 2");
  return wallis_any(d);
}

double gaussian_tail(double alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0)
    throw std::domain_error("gaussian_tail requires alpha >= 0");
  return 0.5 * std::erfc(alpha / std::sqrt(2.0));
}

VolumeFn::VolumeFn(int d) : d_(d) {
  require_dim(d);
  half_norm_ = wallis_any(d);
}

double VolumeFn::operator()(double phi) const { return cap_volume(d_, phi); }

double VolumeFn::inverse(double gamma) const { return inverse_cap_volume(d_, gamma); }

double VolumeFn::density(double phi) const {
  return std::pow(std::sin(phi), d_ - 1) / (2.0 * half_norm_);
}

namespace {

// Tolerance for declaring a strict inequality violated by roundoff alone.
bool slack_ok(double margin, double scale) {
  return margin >= -1e-12 * std::max(1.0, std::fabs(scale));
}

void push_check(VolumeBoundsReport& rep, std::string name, double x, double x2,
                double lower, double upper, double value) {
  VolumeBoundCheck c;
  c.name = std::move(name);
  c.x = x;
  c.x2 = x2;
  c.lower = lower;
  c.upper = upper;
  c.value = value;
  double margin = kInf;
  if (lower > -kInf) margin = std::min(margin, value - lower);
  if (upper < kInf) margin = std::min(margin, upper - value);
  c.margin = margin;
  c.applicable = true;
  c.holds = slack_ok(margin, value);
  rep.evaluated += 1;
  if (!c.holds) rep.violations += 1;
  rep.checks.push_back(std::move(c));
}

void push_skip(VolumeBoundsReport& rep, std::string name, double x, double x2,
               std::string note) {
  VolumeBoundCheck c;
  c.name = std::move(name);
  c.x = x;
  c.x2 = x2;
  c.lower = -kInf;
  c.upper = kInf;
  c.value = std::numeric_limits<double>::quiet_NaN();
  c.margin = std::numeric_limits<double>::quiet_NaN();
  c.applicable = false;
  c.holds = false;
  c.note = std::move(note);
  rep.skipped += 1;
  rep.checks.push_back(std::move(c));
}

}  // namespace

VolumeBoundsReport check_volume_bounds(int d, const std::vector<double>& grid) {
  if (d < 2)
    throw std::invalid_argument("check_volume_bounds requires d >= 2");
  VolumeBoundsReport rep;
  rep.d = d;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double threshold = std::acos(1.0 / std::sqrt(d + 1.0));
  const double wallis = wallis_any(d);

  std::vector<double> pts = grid;
  for (double phi : pts) {
    if (!(phi > 0.0) || phi > kPi) {
      push_skip(rep, "grid_point", phi, nan, "radius outside (0, pi]");
      continue;
    }
    const double v = cap_volume(d, phi);
    const double sphi = std::sin(phi);
    const double spow = std::pow(sphi, d);

    // Power-of-sine sandwich on (0, pi/2).
    if (phi < 0.5 * kPi) {
      push_check(rep, "sin_power", phi, nan,
                 spow / std::sqrt(2.0 * kPi * (d + 1)), 0.5 * spow, v);
    } else {
      push_skip(rep, "sin_power", phi, nan, "requires radius < pi/2");
    }

    // Secant-corrected sandwich up to arccos(1/sqrt(d+1)).
    if (phi <= threshold + 1e-15) {
      const double sec = 1.0 / std::cos(std::min(phi, threshold));
      push_check(rep, "sin_power_secant", phi, nan,
                 spow * sec / (3.0 * std::sqrt(2.0 * kPi * (d + 1))),
                 spow * sec / std::sqrt(2.0 * kPi * d), v);
    } else {
      push_skip(rep, "sin_power_secant", phi, nan,
                "requires radius <= arccos(1/sqrt(d+1))");
    }

    // Constant band between arccos(1/sqrt(d+1)) and the equator. The upper
    // constant 1/2 only holds up to pi/2 (beyond it the cap exceeds half the
    // sphere), so larger radii are skipped.
    if (phi >= threshold - 1e-15 && phi <= 0.5 * kPi + 1e-15) {
      push_check(rep, "equatorial_band", phi, nan,
                 1.0 / (3.0 * std::exp(1.0) * std::sqrt(2.0 * kPi)), 0.5, v);
    } else if (phi < threshold) {
      push_skip(rep, "equatorial_band", phi, nan,
                "requires radius >= arccos(1/sqrt(d+1))");
    } else {
      push_skip(rep, "equatorial_band", phi, nan, "requires radius <= pi/2");
    }

    // Near-hemisphere sandwich: grid value reused as the co-latitude alpha.
    if (phi < 0.5 * kPi) {
      const double alpha = phi;
      const double ca = std::cos(alpha);
      const double gap = 0.5 - cap_volume(d, 0.5 * kPi - alpha);
      const double lower = alpha * std::sqrt((d - 1) / (2.0 * kPi)) *
                           std::exp(-(d - 1) * alpha * alpha / (2.0 * ca * ca));
      const double upper = alpha * std::sqrt(d / (2.0 * kPi));
      push_check(rep, "near_hemisphere", alpha, nan, lower, upper, gap);
    } else {
      push_skip(rep, "near_hemisphere", phi, nan, "requires alpha < pi/2");
    }

    // Tail bound for the sine-power integral: delta sin^{d-1}(delta) never
    // exceeds d times its own integral from 0.
    push_check(rep, "sine_tail_integral", phi, nan, -kInf,
               2.0 * d * wallis * v, phi * std::pow(sphi, d - 1));
  }

  // Pair inequalities over ordered grid pairs delta <= w.
  std::vector<double> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double delta = sorted[i];
    if (!(delta > 0.0) || delta > kPi) continue;
    const double vd = cap_volume(d, delta);
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const double w = sorted[j];
      if (w > kPi || w <= delta) continue;
      const double t = w / delta;
      // Growth of cap volume is at most polynomial of degree d in the radius.
      push_check(rep, "radius_ratio_power", delta, w, -kInf,
                 std::pow(t, d), cap_volume(d, w) / vd);
      // sin(t delta) <= t sin(delta) for t >= 1.
      push_check(rep, "sine_scaling", delta, w, -kInf, t * std::sin(delta),
                 std::sin(w));
    }
  }

  // Wallis integral sandwich for this dimension.
  push_check(rep, "wallis_sandwich", static_cast<double>(d), nan,
             std::sqrt(kPi / (2.0 * d)), std::sqrt(kPi / (2.0 * (d - 1))),
             wallis);

  return rep;
}

}  // namespace capdisp
