#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "capdisp/volume.hpp"

using namespace capdisp;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Absolute-style tolerance: |lhs - rhs| < tol * (1 + max(|lhs|, |rhs|)).
doctest::Approx near(double target, double tol) {
  return doctest::Approx(target).epsilon(tol).scale(1.0);
}

std::vector<double> radius_grid(int count) {
  std::vector<double> grid;
  for (int i = 0; i <= count; ++i) grid.push_back(kPi * i / count);
  return grid;
}

// Closed forms on the circle, the 2-sphere, and the 3-sphere.
double circle_volume(double phi) { return phi / kPi; }
double s2_volume(double phi) { return (1.0 - std::cos(phi)) / 2.0; }
double s3_volume(double phi) { return (phi - std::sin(phi) * std::cos(phi)) / kPi; }

}  // namespace

TEST_CASE("cap volume matches closed forms in low dimensions") {
  for (double phi : radius_grid(40)) {
    CHECK(cap_volume(1, phi) == near(circle_volume(phi), 1e-13));
    CHECK(cap_volume(2, phi) == near(s2_volume(phi), 1e-13));
    CHECK(cap_volume(3, phi) == near(s3_volume(phi), 1e-13));
  }
}

TEST_CASE("cap volume endpoints, hemisphere, and complement identity") {
  for (int d : {1, 2, 3, 5, 10, 40, 100}) {
    CHECK(cap_volume(d, 0.0) == 0.0);
    CHECK(cap_volume(d, kPi) == near(1.0, 1e-14));
    CHECK(cap_volume(d, kPi / 2) == near(0.5, 1e-14));
    for (double phi : {0.2, 0.9, 1.4, 2.0, 2.9}) {
      CHECK(cap_volume(d, kPi - phi) == near(1.0 - cap_volume(d, phi), 1e-12));
    }
  }
  CHECK_THROWS_AS(cap_volume(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cap_volume(2, -0.1), std::domain_error);
  CHECK_THROWS_AS(cap_volume(2, kPi + 0.1), std::domain_error);
}

TEST_CASE("cap volume is nondecreasing in the radius") {
  for (int d : {1, 2, 4, 9, 25}) {
    double prev = 0.0;
    for (double phi : radius_grid(100)) {
      double v = cap_volume(d, phi);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("beta and quadrature evaluation paths agree") {
  for (int d : {1, 2, 3, 5, 10, 25, 50}) {
    for (double phi : radius_grid(24)) {
      CHECK(cap_volume(d, phi) == near(cap_volume_quadrature(d, phi), 1e-12));
    }
  }
}

TEST_CASE("inverse cap volume inverts the volume") {
  for (int d : {1, 2, 3, 7, 20}) {
    for (double gamma : {1e-6, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.97, 0.9999}) {
      double phi = inverse_cap_volume(d, gamma);
      CHECK(phi >= 0.0);
      CHECK(phi <= kPi);
      CHECK(cap_volume(d, phi) == near(gamma, 1e-10));
    }
    CHECK(inverse_cap_volume(d, 0.0) == 0.0);
    CHECK(inverse_cap_volume(d, 1.0) == kPi);
    CHECK(inverse_cap_volume(d, 0.5) == near(kPi / 2, 1e-11));
  }
  CHECK_THROWS_AS(inverse_cap_volume(2, -0.01), std::domain_error);
  CHECK_THROWS_AS(inverse_cap_volume(2, 1.01), std::domain_error);
}

TEST_CASE("wallis integral closed values and product identity") {
  CHECK(wallis_integral(2) == near(1.0, 1e-13));
  CHECK(wallis_integral(3) == near(kPi / 4, 1e-13));
  CHECK(wallis_integral(4) == near(2.0 / 3.0, 1e-13));
  CHECK(wallis_integral(5) == near(3.0 * kPi / 16, 1e-13));
  for (int d = 3; d <= 300; ++d) {
    CHECK(wallis_integral(d) * wallis_integral(d - 1) ==
          near(kPi / (2.0 * (d - 1)), 1e-12));
    CHECK(wallis_integral(d) < wallis_integral(d - 1));
  }
  CHECK_THROWS_AS(wallis_integral(1), std::domain_error);
}

TEST_CASE("gaussian tail values") {
  CHECK(gaussian_tail(0.0) == near(0.5, 1e-15));
  CHECK(gaussian_tail(1.0) == near(0.15865525393145707, 1e-13));
  CHECK(gaussian_tail(2.0) == near(0.022750131948179212, 1e-13));
  CHECK(gaussian_tail(8.0) < 1e-15);
  CHECK_THROWS_AS(gaussian_tail(-0.5), std::domain_error);
}

TEST_CASE("high-dimensional caps approach the gaussian tail") {
  // cos(phi) = alpha / sqrt(d); the volume converges to the tail probability.
  const int d = 400;
  for (double alpha : {0.5, 1.0, 2.0}) {
    double phi = std::acos(alpha / std::sqrt(static_cast<double>(d)));
    double rel = std::abs(cap_volume(d, phi) - gaussian_tail(alpha)) / gaussian_tail(alpha);
    CHECK(rel < 0.02);
  }
}

TEST_CASE("regularized incomplete beta identities") {
  CHECK(reg_inc_beta(1.0, 1.0, 0.3, 0.7) == near(0.3, 1e-14));
  CHECK(reg_inc_beta(0.5, 0.5, 0.5, 0.5) == near(0.5, 1e-13));
  // Beta(2,3) has CDF 6x^2 - 8x^3 + 3x^4.
  CHECK(reg_inc_beta(2.0, 3.0, 0.25, 0.75) == near(0.26171875, 1e-13));
  for (double x : {0.1, 0.37, 0.62, 0.93}) {
    CHECK(reg_inc_beta(1.5, 4.0, x, 1.0 - x) + reg_inc_beta(4.0, 1.5, 1.0 - x, x) ==
          near(1.0, 1e-13));
  }
}

TEST_CASE("volume function object matches the free functions") {
  for (int d : {2, 3, 11}) {
    VolumeFn V(d);
    CHECK(V.dim() == d);
    CHECK(V.normalizer() == near(wallis_integral(d), 1e-13));
    for (double phi : {0.1, 0.8, 1.5, 2.2, 3.0}) {
      CHECK(V(phi) == near(cap_volume(d, phi), 1e-14));
      CHECK(V.density(phi) ==
            near(std::pow(std::sin(phi), d - 1) / (2.0 * wallis_integral(d)), 1e-12));
    }
    CHECK(V.inverse(0.3) == near(inverse_cap_volume(d, 0.3), 1e-12));
  }
}

TEST_CASE("volume inequality families hold on a radius grid") {
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(kPi / 2 * i / 30.0);
  for (int d : {2, 3, 10, 30}) {
    VolumeBoundsReport report = check_volume_bounds(d, grid);
    CHECK(report.d == d);
    CHECK(report.evaluated > 0);
    CHECK(report.violations == 0);
    CHECK(report.all_hold());
    for (const VolumeBoundCheck& check : report.checks) {
      if (!check.applicable) continue;
      CHECK(check.holds);
      CHECK(check.margin >= 0.0);
      CHECK(check.value >= check.lower - 1e-12);
      CHECK(check.value <= check.upper + 1e-12);
    }
  }
  CHECK_THROWS_AS(check_volume_bounds(1, grid), std::invalid_argument);
}
