#pragma once

#include <cstdint>
#include <string>

#include "capdisp/rng.hpp"
#include "capdisp/sphere.hpp"

namespace capdisp {

enum class ConfigKind {
  simplex,
  cross_polytope,
  block_simplices,
  random_uniform,
  greedy_net,
  from_file,
};

ConfigKind config_kind_from_string(const std::string& s);
std::string to_string(ConfigKind kind);

struct ConfigSpec {
  ConfigKind kind = ConfigKind::random_uniform;
  int d = 0;
  int n = 0;           // block_simplices and random_uniform
  double eps = 0.0;    // greedy_net
  std::uint64_t seed = 0;
  std::string path;    // from_file
};

// d+2 unit vectors in R^{d+1} with all pairwise inner products -1/(d+1):
// standard basis of R^{d+2} recentered to the sum-zero hyperplane,
// renormalized, and expressed in the Helmert orthonormal basis.
PointSet regular_simplex(int d);

// The 2(d+1) signed standard basis vectors, ordered e1, -e1, e2, -e2, ...
PointSet cross_polytope(int d);

// For n = d+1+k with 1 <= k <= d+1: the d+1 coordinates are split into k
// blocks (larger blocks first, coordinates assigned in index order), each
// block carrying a regular simplex inscribed in its own unit sphere and
// embedded with zeros elsewhere. k=1 gives the simplex, k=d+1 the
// cross-polytope.
PointSet block_simplices(int d, int n);

PointSet random_uniform(int d, int n, Rng& rng);

struct GreedyNetOptions {
  // Stop once this many consecutive proposals were rejected, where the
  // threshold scales with the current set size but never exceeds the cap.
  std::int64_t rejections_per_point = 10000;
  std::int64_t rejection_cap = 20000000;
  std::int64_t max_points = -1;  // optional early stop, -1 = unlimited
};

// Greedy maximal eps-separated set from uniform random proposals. The output
// is eps-separated by construction; near-maximality (covering radius <= eps)
// depends on the rejection budget and is verified by callers a posteriori.
PointSet greedy_net(int d, double eps, Rng& rng, const GreedyNetOptions& opts = {});

// Dispatch on spec.kind with arity validation.
PointSet make_configuration(const ConfigSpec& spec);

}  // namespace capdisp
