#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <tuple>
#include <vector>

#include "capdisp/configurations.hpp"
#include "capdisp/sphere_grid.hpp"
#include "capdisp/vc.hpp"
#include "capdisp/volume.hpp"

using namespace capdisp;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;

doctest::Approx near(double target, double tol) {
  return doctest::Approx(target).epsilon(tol).scale(1.0);
}

// Subsets a grid of directions can cut out with a clear inner-product gap.
std::set<std::uint64_t> grid_realizable_masks(const PointSet& P, int directions,
                                              double gap) {
  std::set<std::uint64_t> masks;
  Rng rng(909);
  const int n = P.n();
  for (int t = 0; t < directions; ++t) {
    Vec u = sample_uniform_point(P.d + 1, rng);
    std::vector<std::pair<double, int>> dots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dots[static_cast<std::size_t>(i)] = {P.point(i).dot(u), i};
    std::sort(dots.begin(), dots.end());
    std::uint64_t mask = (std::uint64_t{1} << n) - 1;  // threshold below all dots
    masks.insert(mask);
    for (int i = 0; i < n; ++i) {
      mask &= ~(std::uint64_t{1} << dots[static_cast<std::size_t>(i)].second);
      const double next =
          i + 1 < n ? dots[static_cast<std::size_t>(i) + 1].first : 2.0;
      if (next - dots[static_cast<std::size_t>(i)].first >= gap) masks.insert(mask);
    }
  }
  return masks;
}

ApproxFamily hand_lens_family(double eps, int grid_size) {
  ApproxFamily f;
  f.kind = FamilyKind::lenses;
  f.d = 2;
  f.gamma = 0.5;
  f.eps = eps;
  f.centers = cross_polytope(2);
  for (int i = 1; i <= grid_size; ++i) f.radii.push_back(kPi - i * eps);
  double pairs = static_cast<double>(f.centers.n()) * static_cast<double>(f.radii.size());
  f.member_count = pairs * pairs;
  f.log_member_count = 2.0 * std::log(pairs);
  f.cardinality_bound = 2.0 * f.member_count;
  f.log_cardinality_bound = std::log(f.cardinality_bound);
  auto grid = std::make_shared<SphereGrid>(3, eps);
  for (int i = 0; i < f.centers.n(); ++i) grid->insert(f.centers.X.col(i));
  f.net_index = grid;
  return f;
}

}  // namespace

TEST_CASE("growth function values") {
  CHECK(phi_sauer_shelah(2, 3) == BigInt(7));
  CHECK(phi_sauer_shelah(4, 4) == BigInt(16));
  CHECK(phi_sauer_shelah(3, 10) == BigInt(176));
  CHECK(phi_sauer_shelah(4, 100) == BigInt(4087976));
  CHECK(phi_sauer_shelah(2, 100000) == BigInt(5000050001LL));
  CHECK(phi_sauer_shelah(0, 12) == BigInt(1));
  for (int m : {1, 5, 12}) {
    CHECK(phi_sauer_shelah(m, m) == BigInt(1) << m);
    CHECK(phi_sauer_shelah(m + 3, m) == BigInt(1) << m);
    BigInt prev = 0;
    for (int d = 0; d <= m; ++d) {
      BigInt cur = phi_sauer_shelah(d, m);
      CHECK(cur > prev);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(phi_sauer_shelah(-1, 5), std::invalid_argument);
  CHECK_THROWS_AS(phi_sauer_shelah(2, 0), std::invalid_argument);
}

TEST_CASE("cap realization on the octahedron") {
  PointSet P = cross_polytope(2);  // e1, -e1, e2, -e2, e3, -e3
  REQUIRE(P.n() == 6);

  // A full antipodal pair inside the subset and another fully outside cannot
  // be separated: the pair inside forces threshold + margin <= 0 and the pair
  // outside forces threshold - margin >= 0.
  auto pair_mask = [](int axis) { return std::uint64_t{3} << (2 * axis); };
  CapRealization blocked = cap_realizes(P, pair_mask(0));
  CHECK(blocked.status == Realization::no);
  CHECK(blocked.margin <= 1e-9);
  CHECK(cap_realizes(P, pair_mask(1) | pair_mask(2)).status == Realization::no);

  // Singletons, complements of singletons, empty, and full are all cut.
  CapRealization single = cap_realizes(P, 1);
  REQUIRE(single.status == Realization::yes);
  REQUIRE(single.witness.has_value());
  CHECK(cap_contains(*single.witness, P.point(0)));
  for (int i = 1; i < 6; ++i) CHECK_FALSE(cap_contains(*single.witness, P.point(i)));

  CapRealization empty = cap_realizes(P, 0);
  REQUIRE(empty.status == Realization::yes);
  // Deepest hole of the octahedron: geodesic clearance arccos(1/sqrt(3))/2.
  CHECK(empty.margin == near(std::acos(1.0 / std::sqrt(3.0)) / 2.0, 1e-6));
  for (int i = 0; i < 6; ++i) CHECK_FALSE(cap_contains(*empty.witness, P.point(i)));

  CapRealization full = cap_realizes(P, 0b111111);
  CHECK(full.status == Realization::yes);

  // Count over all 64 subsets: exactly the masks with a fully-contained pair
  // and a fully-excluded pair fail, leaving 64 - 18 = 46.
  ShatterCount count = empirical_shatter(P);
  CHECK(count.realized == 46);
  CHECK(count.undecided == 0);
  CHECK(BigInt(count.realized) <= phi_sauer_shelah(P.d + 2, P.n()));
}

TEST_CASE("cap realization input guards") {
  PointSet P = cross_polytope(2);
  CHECK_THROWS_AS(cap_realizes(P, std::uint64_t{1} << 6), std::invalid_argument);
  Rng rng(2);
  PointSet big = sample_uniform(2, 64, rng);
  CHECK_THROWS_AS(cap_realizes(big, 0), std::invalid_argument);
  PointSet wide = sample_uniform(2, 23, rng);
  CHECK_THROWS_AS(empirical_shatter(wide), std::invalid_argument);
}

TEST_CASE("lp decisions agree with a direction-grid scan") {
  Rng rng(717);
  PointSet P = sample_uniform(2, 7, rng);
  std::set<std::uint64_t> seen = grid_realizable_masks(P, 4000, 1e-4);

  std::int64_t realized = 0;
  for (std::uint64_t mask = 0; mask < (1u << 7); ++mask) {
    CapRealization r = cap_realizes(P, mask);
    CHECK(r.status != Realization::undecided);
    if (r.status == Realization::yes) {
      ++realized;
      REQUIRE(r.witness.has_value());
      for (int i = 0; i < P.n(); ++i) {
        CHECK(cap_contains(*r.witness, P.point(i)) == ((mask >> i & 1) != 0));
      }
    } else {
      // Anything a coarse scan separates cleanly must not be refused.
      CHECK(seen.count(mask) == 0);
    }
  }
  for (std::uint64_t mask : seen) {
    CHECK(cap_realizes(P, mask).status == Realization::yes);
  }
  ShatterCount count = empirical_shatter(P);
  CHECK(count.realized == realized);
  CHECK(BigInt(realized) <= phi_sauer_shelah(4, 7));
}

TEST_CASE("shatter counts for degenerate and generic sets") {
  Mat one(3, 1);
  one.col(0) = Vec::Unit(3, 0);
  ShatterCount single = empirical_shatter(make_point_set(2, one));
  CHECK(single.realized == 2);
  CHECK(single.undecided == 0);

  Mat two(3, 2);
  two.col(0) = Vec::Unit(3, 0);
  two.col(1) = -Vec::Unit(3, 0);
  ShatterCount pair = empirical_shatter(make_point_set(2, two));
  CHECK(pair.realized == 4);

  // Affinely independent points are fully shattered.
  ShatterCount simplex = empirical_shatter(regular_simplex(2));
  CHECK(simplex.realized == 16);
  CHECK(simplex.undecided == 0);

  // Five points on the 2-sphere can never realize all 32 subsets.
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(trial));
    PointSet P = sample_uniform(2, 5, stream);
    ShatterCount c = empirical_shatter(P);
    CHECK(c.realized + c.undecided < 32);
    CHECK(BigInt(c.realized) <= phi_sauer_shelah(4, 5));
  }
}

TEST_CASE("random search finds shatterable sets exactly up to d + 2") {
  Rng rng(0);
  auto hit = vc_lower_bound_search(2, 4, 1000, rng);
  REQUIRE(hit.has_value());
  CHECK(hit->d == 2);
  CHECK(hit->n() == 4);
  CHECK(hit->label.substr(0, 9) == "shattered");
  ShatterCount c = empirical_shatter(*hit);
  CHECK(c.realized == 16);

  // Deterministic replay: the same seed returns the same witness.
  Rng replay(0);
  auto again = vc_lower_bound_search(2, 4, 1000, replay);
  REQUIRE(again.has_value());
  CHECK((again->X - hit->X).cwiseAbs().maxCoeff() == 0.0);

  // Arcs shatter three points on the circle but never four.
  Rng circle(1);
  CHECK(vc_lower_bound_search(1, 3, 50, circle).has_value());
  CHECK_FALSE(vc_lower_bound_search(1, 4, 50, circle).has_value());

  // One more than the VC dimension of caps on the 2-sphere.
  Rng s2(2);
  CHECK_FALSE(vc_lower_bound_search(2, 5, 40, s2).has_value());

  CHECK_FALSE(vc_lower_bound_search(2, 4, 0, rng).has_value());
  CHECK_THROWS_AS(vc_lower_bound_search(2, 0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(vc_lower_bound_search(2, 23, 10, rng), std::invalid_argument);
}

TEST_CASE("traversal probability bound") {
  TraversalBound tb = vc_traversal_bound(10, 2, 0.5);
  const double expected = 2.0 * std::pow(2.0 * kE * 10.0 / 2.0, 2.0) *
                          std::pow(2.0, -0.5 * 0.5 * 10.0);
  CHECK(tb.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(tb.log_value == doctest::Approx(std::log(expected)).epsilon(1e-12));
  CHECK(tb.informative == (tb.value < 1.0));

  // Strictly decreasing in eps, and the closed-form threshold makes it < 1.
  double prev = vc_traversal_bound(1000, 3, 0.01).log_value;
  for (double eps : {0.02, 0.05, 0.1, 0.3}) {
    double cur = vc_traversal_bound(1000, 3, eps).log_value;
    CHECK(cur < prev);
    prev = cur;
  }
  for (std::int64_t m : {100LL, 10000LL, 1000000LL}) {
    for (std::int64_t d : {1LL, 3LL, 10LL}) {
      const double md = static_cast<double>(m) / static_cast<double>(d);
      const double eps_m = 3.0 / std::log(2.0) * (1.0 / md) * std::log(2.0 * kE * md);
      TraversalBound at = vc_traversal_bound(m, d, eps_m);
      CHECK(at.informative);
      CHECK(at.log_value < 0.0);
    }
  }

  // Huge value still reports a usable log.
  TraversalBound big = vc_traversal_bound(1000000, 400, 1e-9);
  CHECK(std::isinf(big.value));
  CHECK(std::isfinite(big.log_value));
  CHECK_FALSE(big.informative);

  CHECK_THROWS_AS(vc_traversal_bound(5, 10, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(vc_traversal_bound(10, 0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(vc_traversal_bound(10, 2, 0.0), std::invalid_argument);
}

TEST_CASE("cap family covers every cap of the target volume") {
  const int d = 2;
  const double gamma = 0.5;
  ApproxFamily f = delta_approx_caps(d, gamma);
  CHECK(f.kind == FamilyKind::caps);
  CHECK(f.delta == near(inverse_cap_volume(d, gamma), 1e-10));
  CHECK(f.eps == near(gamma * f.delta / (3.0 * d), 1e-12));
  REQUIRE(f.radii.size() == 1);
  CHECK(f.radii[0] == near(f.delta - f.eps, 1e-12));
  CHECK(f.member_count == static_cast<double>(f.net_size()));
  CHECK(f.member_count <= f.cardinality_bound);
  CHECK(f.log_cardinality_bound ==
        near(std::log(2.0) + d * std::log(3.0 * d * kPi / (gamma * gamma)), 1e-9));

  // The centers form an eps-covering (the property approximate() needs) and
  // contain no duplicates.
  {
    Rng probe_rng(91);
    for (int t = 0; t < 500; ++t) {
      Vec q = sample_uniform_point(d + 1, probe_rng);
      CHECK(f.net_index->has_within(q, f.eps));
    }
    for (int i = 0; i < std::min<int>(40, f.centers.n()); ++i)
      for (int j = i + 1; j < std::min<int>(40, f.centers.n()); ++j)
        CHECK(geodesic_distance(f.centers.point(i), f.centers.point(j)) > 1e-9);
  }

  // Any volume-gamma cap contains its approximating member, and the member
  // keeps at least half the volume.
  const double member_volume = cap_volume(d, f.radii[0]);
  CHECK(member_volume >= gamma * std::exp(-gamma / 2.0) - 1e-12);
  CHECK(member_volume >= f.c0 * gamma);
  Rng rng(515);
  for (int t = 0; t < 50; ++t) {
    Cap target = make_cap(sample_uniform_point(d + 1, rng), f.delta);
    Cap member = f.approximate(target);
    CHECK(geodesic_distance(member.center, target.center) +
              member.radius <=
          target.radius + 1e-12);
  }

  std::vector<Cap> all = materialize_caps(f);
  CHECK(all.size() == static_cast<std::size_t>(f.net_size()));
  CHECK(all[3].radius == f.radii[0]);

  CHECK_THROWS_AS(delta_approx_caps(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(delta_approx_caps(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(delta_approx_caps(2, 1.0), std::invalid_argument);
  // An eps-net this fine would need far more centers than the build budget.
  CHECK_THROWS_AS(delta_approx_caps(7, 0.02), std::runtime_error);
  CHECK_THROWS_AS(f.lens_member(0), std::invalid_argument);
  CHECK_THROWS_AS(f.cap_member(f.net_size()), std::out_of_range);
}

TEST_CASE("lens member indexing is a bijection onto ordered pairs") {
  ApproxFamily f = hand_lens_family(0.5, 2);
  const std::int64_t A = f.net_size();  // 6 centers
  const std::int64_t B = static_cast<std::int64_t>(f.radii.size());
  REQUIRE(f.member_count == 144.0);

  std::set<std::tuple<int, int, int, int>> seen;
  for (std::int64_t i = 0; i < 144; ++i) {
    Lens L = f.lens_member(i);
    REQUIRE(L.caps.size() == 2);
    // Recover the mixed-radix digits from the geometry.
    auto locate = [&](const Cap& c) {
      int ci = -1, ri = -1;
      for (int j = 0; j < A; ++j)
        if ((c.center - f.centers.point(j)).norm() < 1e-12) ci = j;
      for (int j = 0; j < B; ++j)
        if (std::abs(c.radius - f.radii[static_cast<std::size_t>(j)]) < 1e-12) ri = j;
      REQUIRE(ci >= 0);
      REQUIRE(ri >= 0);
      return std::pair<int, int>(ci, ri);
    };
    auto [c1, r1] = locate(L.caps[0]);
    auto [c2, r2] = locate(L.caps[1]);
    seen.insert({c1, r1, c2, r2});
    // The index encodes (c1, r1, c2, r2) in mixed radix, last digit fastest.
    CHECK(i == ((static_cast<std::int64_t>(c1) * B + r1) * A + c2) * B + r2);
  }
  CHECK(seen.size() == 144);
  CHECK_THROWS_AS(f.lens_member(144), std::out_of_range);
  CHECK_THROWS_AS(f.lens_member(-1), std::out_of_range);
  CHECK_THROWS_AS(f.cap_member(0), std::invalid_argument);

  std::vector<Lens> all = materialize_lenses(f);
  CHECK(all.size() == 144);

  ApproxFamily huge = f;
  huge.member_count = 2e7;
  CHECK_THROWS_AS(materialize_lenses(huge), std::runtime_error);
}

TEST_CASE("lens approximation rounds the radius down the grid") {
  const double eps = 0.5;
  ApproxFamily f = hand_lens_family(eps, 6);  // radii pi - 0.5 i, i = 1..6
  Vec e1 = Vec::Unit(3, 0);
  Vec e2 = Vec::Unit(3, 1);

  Lens target = make_lens({make_cap(e1, 2.0), make_cap(e2, 2.6)});
  Lens member = f.approximate(target);
  REQUIRE(member.caps.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(geodesic_distance(member.caps[c].center, target.caps[c].center) <= eps);
    CHECK(member.caps[c].radius >= target.caps[c].radius - 2.0 * eps - 1e-12);
    CHECK(member.caps[c].radius < target.caps[c].radius - eps + 1e-12);
  }

  // A full-sphere cap maps to the top of the grid.
  Lens whole = f.approximate(make_lens({make_cap(e1, kPi)}));
  REQUIRE(whole.caps.size() == 2);
  CHECK(whole.caps[0].radius == f.radii[1]);
  CHECK(whole.caps[1].radius == f.radii[1]);

  // Targets with centers far from every net center expose a covering failure.
  Vec far(3);
  far << 1.0, 1.0, 1.0;
  far.normalize();
  CHECK_THROWS_AS(f.approximate(make_lens({make_cap(far, 2.0)})), std::runtime_error);

  CHECK_THROWS_AS(delta_approx_lenses(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(delta_approx_lenses(2, 1.5), std::invalid_argument);
}

TEST_CASE("point counts from family sizes") {
  const double c0 = 0.5;
  const double gamma = 0.2;
  CHECK(n_from_approx(c0, gamma, 1000.0, NetBoundVariant::random_choice) ==
        near(3.0 * std::log(1000.0) / (c0 * gamma), 1e-9));
  CHECK(n_from_approx(c0, gamma, 1000.0, NetBoundVariant::derandomized) ==
        near(std::log(4.0 * c0 * gamma * 1000.0) / (c0 * gamma), 1e-9));
  CHECK(n_from_approx(c0, gamma, 1000.0, NetBoundVariant::derandomized) <
        n_from_approx(c0, gamma, 1000.0, NetBoundVariant::random_choice));
  CHECK(n_from_approx_log(c0, gamma, std::log(1000.0), NetBoundVariant::random_choice) ==
        near(n_from_approx(c0, gamma, 1000.0, NetBoundVariant::random_choice), 1e-9));
  // Log form handles family sizes far beyond the double range.
  CHECK(n_from_approx_log(c0, gamma, 1e6, NetBoundVariant::random_choice) ==
        near(3e6 / (c0 * gamma), 1.0));

  CHECK_THROWS_AS(n_from_approx(c0, gamma, 2.0, NetBoundVariant::random_choice),
                  std::invalid_argument);
  CHECK_THROWS_AS(n_from_approx(c0, 0.7, 1000.0, NetBoundVariant::derandomized),
                  std::invalid_argument);
  CHECK_THROWS_AS(n_from_approx(c0, 0.2, 10.0, NetBoundVariant::derandomized),
                  std::invalid_argument);
  CHECK_THROWS_AS(n_from_approx(0.0, gamma, 1000.0, NetBoundVariant::random_choice),
                  std::invalid_argument);
  CHECK_THROWS_AS(n_from_approx(c0, gamma, 0.5, NetBoundVariant::random_choice),
                  std::invalid_argument);
}
