#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "capdisp/sphere.hpp"

namespace capdisp {

// Spatial hash over unit vectors supporting "is anything within geodesic
// distance eps" queries. Cells have side equal to the chord length of eps, so
// any point that close to the query lies in one of the 3^{d+1} neighboring
// cells. Hash collisions between distant cells are harmless: candidates are
// always verified against the true geodesic distance. For ambient dimensions
// where the neighbor enumeration would explode, queries fall back to a linear
// scan.
class SphereGrid {
 public:
  SphereGrid(int ambient_dim, double eps);

  int insert(const Vec& p);  // returns the index assigned to p
  int size() const { return static_cast<int>(pts_.size()); }
  const Vec& point(int i) const { return pts_[static_cast<std::size_t>(i)]; }
  double build_radius() const { return eps_; }

  // Index of the nearest stored point within geodesic distance eps of q, or
  // -1 if none. dist_out (optional) receives the distance to that point.
  int nearest_within(const Vec& q, double eps, double* dist_out = nullptr) const;
  bool has_within(const Vec& q, double eps) const {
    return nearest_within(q, eps) >= 0;
  }

 private:
  std::uint64_t cell_key(const Vec& p, const std::vector<int>& offset) const;
  void cell_coords(const Vec& p, std::vector<std::int64_t>& out) const;

  int ambient_;
  double eps_;
  double cell_;
  bool use_hash_;
  std::vector<Vec> pts_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace capdisp
