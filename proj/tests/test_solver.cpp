#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "capdisp/configurations.hpp"
#include "capdisp/solver.hpp"
#include "capdisp/sphere.hpp"
#include "capdisp/volume.hpp"

using namespace capdisp;

namespace {

constexpr double kPi = 3.14159265358979323846;

doctest::Approx near(double target, double tol) {
  return doctest::Approx(target).epsilon(tol).scale(1.0);
}

PointSet circle_points(int n) {
  Mat x(2, n);
  for (int i = 0; i < n; ++i) {
    double theta = 2.0 * kPi * i / n;
    x(0, i) = std::cos(theta);
    x(1, i) = std::sin(theta);
  }
  return make_point_set(1, std::move(x), "circle");
}

double distance_to_set(const PointSet& P, const Vec& u) {
  double best = kPi;
  for (int i = 0; i < P.n(); ++i)
    best = std::min(best, geodesic_distance(u, P.point(i)));
  return best;
}

// A certified witness cap must be empty of points and match the radius.
void check_cap_witness(const PointSet& P, const DispersionResult& res, double tol) {
  REQUIRE(std::holds_alternative<Cap>(res.witness));
  const Cap& cap = std::get<Cap>(res.witness);
  CHECK(cap.radius == near(res.covering_radius, tol));
  CHECK(distance_to_set(P, cap.center) == near(res.covering_radius, tol));
}

}  // namespace

TEST_CASE("support problem evaluates the minimax objective") {
  PointSet P = cross_polytope(2);
  SupportProblem f(P);
  Vec u(3);
  u << 1.0, 0.0, 0.0;
  CHECK(f.value(u) == 1.0);
  CHECK(f.argmax(u) == 0);
  Vec v(3);
  v << 1.0, 1.0, 1.0;
  v.normalize();
  CHECK(f.value(v) == near(1.0 / std::sqrt(3.0), 1e-14));
  CHECK(f.active_set(v, 1e-9).size() == 3);
}

TEST_CASE("exact solver reproduces closed-form configurations") {
  for (int d : {2, 3, 4}) {
    DispersionResult simplex = covering_radius_exact(regular_simplex(d));
    CHECK(simplex.certified);
    CHECK(simplex.covering_radius == near(std::acos(1.0 / (d + 1)), 1e-10));
    CHECK(simplex.value == near(cap_volume(d, simplex.covering_radius), 1e-12));
    check_cap_witness(regular_simplex(d), simplex, 1e-9);

    DispersionResult cross = covering_radius_exact(cross_polytope(d));
    CHECK(cross.covering_radius == near(std::acos(1.0 / std::sqrt(d + 1.0)), 1e-10));
    check_cap_witness(cross_polytope(d), cross, 1e-9);
  }
}

TEST_CASE("equally spaced circle points have dispersion 1/n") {
  for (int n : {2, 3, 7, 16, 33}) {
    DispersionResult res = covering_radius_exact(circle_points(n));
    CHECK(res.value == near(1.0 / n, 1e-12));
    CHECK(res.covering_radius == near(kPi / n, 1e-12));
  }
}

TEST_CASE("single point and antipodal pair") {
  Mat one(3, 1);
  one.col(0) = Vec::Unit(3, 0);
  DispersionResult single = covering_radius_exact(make_point_set(2, one));
  CHECK(single.value == 1.0);
  CHECK(single.covering_radius == near(kPi, 1e-15));

  Mat two(3, 2);
  two.col(0) = Vec::Unit(3, 0);
  two.col(1) = -Vec::Unit(3, 0);
  DispersionResult pair = covering_radius_exact(make_point_set(2, two));
  CHECK(pair.value == near(0.5, 1e-13));
  CHECK(pair.covering_radius == near(kPi / 2, 1e-12));
}

TEST_CASE("few points cannot disperse below one half") {
  Rng rng(21);
  for (int d : {2, 3, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      Rng stream = rng.derive(static_cast<std::uint64_t>(d * 100 + trial));
      PointSet P = sample_uniform(d, 1 + (trial % (d + 1)), stream);
      DispersionResult res = covering_radius_exact(P);
      CHECK(res.value >= 0.5 - 1e-12);
    }
  }
}

TEST_CASE("product of count and dispersion is at least one") {
  Rng rng(33);
  for (int trial = 0; trial < 15; ++trial) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(trial));
    PointSet P = sample_uniform(2, 5 + trial, stream);
    DispersionResult res = covering_radius_exact(P);
    CHECK(static_cast<double>(P.n()) * res.value >= 1.0 - 1e-9);
  }
}

TEST_CASE("exact solver is rotation invariant") {
  Rng rng(55);
  PointSet P = sample_uniform(2, 14, rng);
  DispersionResult base = covering_radius_exact(P);
  for (int trial = 0; trial < 3; ++trial) {
    PointSet R = apply_rotation(P, random_rotation(3, rng));
    DispersionResult rotated = covering_radius_exact(R);
    CHECK(rotated.covering_radius == near(base.covering_radius, 1e-10));
  }
}

TEST_CASE("exact solver refuses oversized enumerations") {
  Rng rng(1);
  PointSet P = sample_uniform(2, 40, rng);
  ExactOptions opts;
  opts.subset_budget = 100;
  CHECK_THROWS_AS(covering_radius_exact(P, opts), std::invalid_argument);
}

TEST_CASE("multistart optimization matches the exact solver") {
  Rng rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(trial));
    PointSet P = sample_uniform(2, 12, stream);
    DispersionResult exact = covering_radius_exact(P);
    Rng opt_rng(99, static_cast<std::uint64_t>(trial));
    DispersionResult opt = covering_radius_opt(P, 24, opt_rng);
    CHECK_FALSE(opt.certified);
    CHECK(opt.covering_radius == near(exact.covering_radius, 1e-6));
    // A local search result never exceeds the true covering radius.
    CHECK(opt.covering_radius <= exact.covering_radius + 1e-9);
  }
  Rng r(1);
  PointSet P = sample_uniform(2, 4, r);
  CHECK_THROWS_AS(covering_radius_opt(P, 0, r), std::invalid_argument);
}

TEST_CASE("more restarts never worsen the optimization result") {
  Rng rng(101);
  PointSet P = sample_uniform(3, 15, rng);
  Rng a(5), b(5);
  DispersionResult few = covering_radius_opt(P, 4, a);
  DispersionResult many = covering_radius_opt(P, 16, b);
  CHECK(many.covering_radius >= few.covering_radius - 1e-15);
}

TEST_CASE("monte carlo lower-bounds the exact dispersion") {
  Rng rng(202);
  for (int trial = 0; trial < 5; ++trial) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(trial));
    PointSet P = sample_uniform(2, 10, stream);
    DispersionResult exact = covering_radius_exact(P);
    Rng mc_rng(7, static_cast<std::uint64_t>(trial));
    DispersionResult mc = dispersion_monte_carlo(P, 20000, mc_rng);
    CHECK_FALSE(mc.certified);
    CHECK(mc.value <= exact.value + 1e-12);
    CHECK(mc.value >= 0.5 * exact.value);  // 20k samples land well inside the hole
  }

  // Sample-count prefixes are reproducible: more samples only move the max up.
  Rng a(9), b(9);
  PointSet P = sample_uniform(2, 8, a);
  Rng m1(13), m2(13);
  DispersionResult small = dispersion_monte_carlo(P, 4096, m1);
  DispersionResult large = dispersion_monte_carlo(P, 8192, m2);
  CHECK(large.value >= small.value);
  CHECK_THROWS_AS(dispersion_monte_carlo(P, 0, a), std::invalid_argument);
}

TEST_CASE("lens volume reduces to cap volume for a single cap") {
  Rng rng(303);
  for (int d : {1, 2, 3, 6}) {
    for (double radius : {0.3, 1.0, kPi / 2, 2.5}) {
      Vec c = sample_uniform_point(d + 1, rng);
      bool converged = true;
      double vol = lens_volume(make_lens({make_cap(c, radius)}), &converged);
      CHECK(converged);
      CHECK(vol == near(cap_volume(d, radius), 1e-8));
    }
  }
}

TEST_CASE("two hemispheres intersect in a lune of known volume") {
  // Normalized measure of {x : <a,x> >= 0, <b,x> >= 0} is (pi - angle)/(2 pi)
  // in every dimension.
  for (int d : {1, 2, 3, 5}) {
    for (double psi : {0.4, kPi / 3, kPi / 2, 2.2, 2.9}) {
      Vec a = Vec::Zero(d + 1), b = Vec::Zero(d + 1);
      a(0) = 1.0;
      b(0) = std::cos(psi);
      b(1) = std::sin(psi);
      Lens lune = make_lens({make_cap(a, kPi / 2), make_cap(b, kPi / 2)});
      CHECK(lens_volume(lune) == near((kPi - psi) / (2.0 * kPi), 1e-7));
    }
  }
}

TEST_CASE("lens volume agrees with direct hit counting") {
  Rng rng(404);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 4; ++trial) {
      Vec a = sample_uniform_point(d + 1, rng);
      Vec b = sample_uniform_point(d + 1, rng);
      double r1 = rng.uniform(0.6, 2.4);
      double r2 = rng.uniform(0.6, 2.4);
      Lens lens = make_lens({make_cap(a, r1), make_cap(b, r2)});
      double vol = lens_volume(lens);

      const int samples = 200000;
      Rng hit_rng(50 + static_cast<std::uint64_t>(10 * d + trial));
      int hits = 0;
      for (int s = 0; s < samples; ++s) {
        if (lens_contains(lens, sample_uniform_point(d + 1, hit_rng))) ++hits;
      }
      double estimate = static_cast<double>(hits) / samples;
      double sigma = std::sqrt(std::max(vol * (1.0 - vol), 1e-6) / samples);
      CHECK(std::abs(estimate - vol) <= 4.0 * sigma);
    }
  }
}

TEST_CASE("disjoint and nested cap pairs") {
  Vec a = Vec::Unit(3, 0), b = Vec::Unit(3, 1);
  // Caps so small they cannot meet across a pi/2 center gap.
  Lens far_apart = make_lens({make_cap(a, 0.3), make_cap(b, 0.3)});
  CHECK(lens_volume(far_apart) == near(0.0, 1e-10));
  // One cap inside the other: intersection is the smaller cap.
  Lens nested = make_lens({make_cap(a, 0.4), make_cap(a, 2.0)});
  CHECK(lens_volume(nested) == near(cap_volume(2, 0.4), 1e-8));
  CHECK_THROWS_AS(
      lens_volume(make_lens({make_cap(a, 1.0), make_cap(b, 1.0), make_cap(a, 1.0)})),
      std::invalid_argument);
}

TEST_CASE("circle arcs intersect exactly") {
  Vec a(2), b(2);
  a << 1.0, 0.0;
  double psi = 1.1;
  b << std::cos(psi), std::sin(psi);
  // Arcs [-0.8, 0.8] and [psi - 0.7, psi + 0.7] overlap on [0.4, 0.8].
  Lens arcs = make_lens({make_cap(a, 0.8), make_cap(b, 0.7)});
  CHECK(lens_volume(arcs) == near(0.4 / (2.0 * kPi), 1e-13));
}

TEST_CASE("lens dispersion dominates cap dispersion") {
  Rng rng(505);
  for (int trial = 0; trial < 4; ++trial) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(trial));
    PointSet P = sample_uniform(2, 9, stream);
    Rng lens_rng(606, static_cast<std::uint64_t>(trial));
    Rng floor_rng(606, static_cast<std::uint64_t>(trial));
    DispersionResult lens = lens_dispersion_estimate(P, 12, lens_rng);
    DispersionResult floor = covering_radius_opt(P, 12, floor_rng);
    CHECK(lens.method == SolveMethod::lens_search);
    CHECK_FALSE(lens.certified);
    // The cap search seeds the lens search and floors its value.
    CHECK(lens.diagnostics.at("cap_search_value") == floor.value);
    CHECK(lens.value >= floor.value - 1e-12);
    if (std::holds_alternative<Lens>(lens.witness)) {
      // The witness lens is empty: no point lies in every cap of the lens.
      const Lens& witness = std::get<Lens>(lens.witness);
      for (int i = 0; i < P.n(); ++i) {
        CHECK_FALSE(lens_contains(witness, P.point(i)));
      }
    } else {
      const Cap& witness = std::get<Cap>(lens.witness);
      CHECK(distance_to_set(P, witness.center) >= witness.radius - 1e-9);
    }
  }
  Rng r(1);
  PointSet P = sample_uniform(2, 4, r);
  CHECK_THROWS_AS(lens_dispersion_estimate(P, 0, r), std::invalid_argument);
}

TEST_CASE("method names are stable strings") {
  CHECK(to_string(SolveMethod::exact_enum) == "exact_enum");
  CHECK(to_string(SolveMethod::minimax_opt) == "minimax_opt");
  CHECK(to_string(SolveMethod::monte_carlo) == "monte_carlo");
  CHECK(to_string(SolveMethod::lens_search) == "lens_search");
}
