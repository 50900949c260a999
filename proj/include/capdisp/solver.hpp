#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "capdisp/rng.hpp"
#include "capdisp/sphere.hpp"

namespace capdisp {

enum class SolveMethod { exact_enum, minimax_opt, monte_carlo, lens_search };

std::string to_string(SolveMethod method);

struct DispersionResult {
  double value = 0.0;            // dispersion (normalized volume in [0, 1])
  double covering_radius = 0.0;  // phi in [0, pi]; value = V(phi) for cap witnesses
  std::variant<Cap, Lens> witness;
  SolveMethod method = SolveMethod::exact_enum;
  bool certified = false;
  std::map<std::string, double> diagnostics;
};

// The minimax objective over the unit sphere: f(u) = max_i <x_i, u>. The
// covering radius of P is arccos of its minimum.
class SupportProblem {
 public:
  explicit SupportProblem(const PointSet& P) : P_(&P) {}
  double value(const Vec& u) const;
  int argmax(const Vec& u) const;
  std::vector<int> active_set(const Vec& u, double tol) const;
  const PointSet& points() const { return *P_; }

 private:
  const PointSet* P_;
};

struct ExactOptions {
  // Enumeration refuses to start when C(n, d+1) exceeds this.
  std::int64_t subset_budget = 10000000;
};

// Certified covering radius / dispersion by candidate enumeration. Candidate
// directions come from (a) the hyperplane normals of every affinely
// independent (d+1)-subset, (b) the direction opposite the minimum-norm point
// of conv(P) when the origin lies outside the hull, and (c) a feasibility
// certificate for a nonzero direction with all inner products <= 0, which
// pins the minimax value to exactly 0 when the origin sits on the hull
// boundary. Together these cover every position of the hull relative to the
// origin.
DispersionResult covering_radius_exact(const PointSet& P, const ExactOptions& opts = {});

// Multistart projected subgradient descent on f with an active-set polish.
// Restart streams are derived from rng without advancing it, so a run with
// more restarts minimizes over a superset of starts.
DispersionResult covering_radius_opt(const PointSet& P, int restarts, Rng& rng);

// Monte Carlo lower bound: running max over uniform samples y of
// min_i rho(x_i, y), reported through V. Sampling is organized in fixed-size
// batches with per-batch derived streams, so prefixes are reproducible and
// parallel evaluation is deterministic.
DispersionResult dispersion_monte_carlo(const PointSet& P, std::int64_t samples, Rng& rng);

// Normalized volume of an intersection of one or two caps. Reduction to a
// one-dimensional integral over the polar angle of the first cap, the
// cross-section fraction being a (d-1)-cap volume; absolute accuracy 1e-8.
// On the circle (d = 1) the arc intersection is computed exactly.
// `converged` (optional) is set to false if the quadrature node cap was hit.
double lens_volume(const Lens& L, bool* converged = nullptr);

// Lower-bound estimate of the lens dispersion: seeded by the best empty cap
// (a cap is a lens) and random starts, then a local search over the two
// centers and radii, with radii kept at the largest values excluding P.
DispersionResult lens_dispersion_estimate(const PointSet& P, int restarts, Rng& rng);

}  // namespace capdisp
