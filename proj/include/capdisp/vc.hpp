#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "capdisp/rng.hpp"
#include "capdisp/sphere.hpp"

namespace capdisp {

class SphereGrid;

using BigInt = boost::multiprecision::cpp_int;

// Phi_d(m) = sum_{k=0}^{d} C(m, k), exact. Equals 2^m when d >= m.
BigInt phi_sauer_shelah(int d, int m);

// Can the subset T of P be cut out by a cap? Decided by a margin-maximizing
// LP over halfspaces {y : <y, u> >= t}, so the answer is three-valued:
// "yes" requires a rechecked strict margin >= 1e-9, "no" requires an
// optimal LP with tight certificates and margin below that threshold, and
// anything the LP cannot settle stays "undecided" rather than guessing.
enum class Realization { yes, no, undecided };

struct CapRealization {
  Realization status = Realization::undecided;
  std::optional<Cap> witness;  // present iff status == yes
  double margin = 0.0;  // inner-product slack (geodesic clearance for T = {})
  std::string note;     // reason when undecided
};

// Bit i of mask selects point i. Requires |P| <= 63.
CapRealization cap_realizes(const PointSet& P, std::uint64_t mask);

struct ShatterCount {
  std::int64_t realized = 0;   // masks certified separable
  std::int64_t undecided = 0;  // masks the LP could not settle
};

// Exhaustive cap_realizes over all 2^m subsets. Requires |P| <= 22.
ShatterCount empirical_shatter(const PointSet& P);

// Random search for a k-point set on S^d shattered by caps. Returns the
// witness from the lowest-numbered successful trial, or nothing. Evidence
// for a VC-dimension lower bound only; failure certifies nothing.
std::optional<PointSet> vc_lower_bound_search(int d, int k, std::int64_t trials,
                                              const Rng& rng);

// P(some volume-eps cap among 2m points contains none of the first m):
// bound 2 (2em/d)^d 2^{-eps m / 2}. The value is never clipped; callers
// wanting "is this bound meaningful" read the flag (value < 1).
struct TraversalBound {
  double value = 0.0;
  double log_value = 0.0;  // natural log, usable when value overflows
  bool informative = false;
};

TraversalBound vc_traversal_bound(std::int64_t m, std::int64_t d, double eps);

// A family N of caps (or lenses) such that every cap (lens) of volume gamma
// contains some member B in N with |B| >= c0 * gamma. Members are stored
// implicitly: caps are net centers with one shared radius; lens members are
// all ordered pairs (center, grid radius) x (center, grid radius). Lens
// families easily exceed 2^63 members, so counts travel as doubles plus
// natural logs.
enum class FamilyKind { caps, lenses };

struct ApproxFamily {
  FamilyKind kind = FamilyKind::caps;
  int d = 0;
  double gamma = 0.0;
  double c0 = 0.5;
  double delta = 0.0;  // caps: the radius with V(delta) = gamma
  double eps = 0.0;    // net resolution; also the radius-grid step for lenses
  PointSet centers;    // the eps-net
  std::vector<double> radii;  // caps: {delta - eps}; lenses: pi - i*eps
  double member_count = 0.0;
  double log_member_count = 0.0;
  double cardinality_bound = 0.0;  // closed-form cap on member_count
  double log_cardinality_bound = 0.0;
  std::shared_ptr<const SphereGrid> net_index;  // nearest-center queries

  std::int64_t net_size() const { return centers.n(); }
  Cap cap_member(std::int64_t index) const;    // caps families
  Lens lens_member(std::int64_t index) const;  // lens families

  // The member guaranteed inside a volume-gamma target: nearest net center,
  // radius rounded down the grid. Throws if no center lies within eps of the
  // target's center (a covering failure).
  Cap approximate(const Cap& target) const;
  Lens approximate(const Lens& target) const;
};

// Family of caps B(w, delta - eps) over an eps-net of centers, where
// V(delta) = gamma and eps = gamma * delta / (3d). Guarantee factor 1/2;
// cardinality at most 2 (3 d pi / gamma^2)^d. Centers come from a
// deterministic projected-lattice net whose covering radius is at most eps by
// construction; a probe pass re-verifies covering and raises "net not
// maximal" on any miss.
ApproxFamily delta_approx_caps(int d, double gamma);

// Family of all cap pairs with centers on an eps-net and radii on the grid
// {pi - i*eps : i = 1..k+1}, eps = gamma^2 / (12d), k = ceil((pi-gamma)/eps).
// Guarantee factor 1/2; cardinality at most 9 (12 d pi / gamma^2)^(2(d+1)).
ApproxFamily delta_approx_lenses(int d, double gamma);

// Explicit member lists, gated by a 10^7-member budget; beyond it the family
// is "too large" and the error carries the exact counts.
std::vector<Cap> materialize_caps(const ApproxFamily& f);
std::vector<Lens> materialize_lenses(const ApproxFamily& f);

// Points sufficient for dispersion <= gamma given a (c0*gamma)-approximation
// of the stated size. The random-placement bound needs >= 3 members; the
// derandomized variant needs gamma < 1/(3c0) and >= e/(c0*gamma) members,
// and improves the constant.
enum class NetBoundVariant { random_choice, derandomized };

double n_from_approx(double c0, double gamma, double family_size,
                     NetBoundVariant variant);
// Same bounds from ln(family size), for families too large to count exactly.
double n_from_approx_log(double c0, double gamma, double log_family_size,
                         NetBoundVariant variant);

}  // namespace capdisp
