#include "capdisp/sphere_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace capdisp {

namespace {

// 3^{d+1} neighbor cells stay affordable up to this ambient dimension.
constexpr int kMaxHashAmbient = 12;

std::uint64_t fnv1a(const std::vector<std::int64_t>& coords) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::int64_t c : coords) {
    auto u = static_cast<std::uint64_t>(c);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (u >> (8 * byte)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace

SphereGrid::SphereGrid(int ambient_dim, double eps) : ambient_(ambient_dim), eps_(eps) {
  if (ambient_dim < 2) throw std::invalid_argument("SphereGrid: ambient dimension must be >= 2");
  if (!(eps > 0.0)) throw std::invalid_argument("SphereGrid: eps must be positive");
  cell_ = 2.0 * std::sin(std::min(eps, 3.14159265358979323846) / 2.0);
  use_hash_ = ambient_ <= kMaxHashAmbient && cell_ > 1e-12;
}

void SphereGrid::cell_coords(const Vec& p, std::vector<std::int64_t>& out) const {
  out.resize(static_cast<std::size_t>(ambient_));
  for (int k = 0; k < ambient_; ++k)
    out[static_cast<std::size_t>(k)] =
        static_cast<std::int64_t>(std::floor(p[k] / cell_));
}

int SphereGrid::insert(const Vec& p) {
  const int id = size();
  pts_.push_back(p);
  if (use_hash_) {
    std::vector<std::int64_t> coords;
    cell_coords(p, coords);
    cells_[fnv1a(coords)].push_back(id);
  }
  return id;
}

int SphereGrid::nearest_within(const Vec& q, double eps, double* dist_out) const {
  int best = -1;
  double best_dist = eps;
  auto consider = [&](int id) {
    const double dist = geodesic_distance(pts_[static_cast<std::size_t>(id)], q);
    if (dist <= best_dist) {
      best_dist = dist;
      best = id;
    }
  };

  if (!use_hash_ || eps > eps_ + 1e-15) {
    for (int id = 0; id < size(); ++id) consider(id);
  } else {
    std::vector<std::int64_t> base;
    cell_coords(q, base);
    std::vector<std::int64_t> probe = base;
    // Odometer over the {-1, 0, 1}^{ambient} neighborhood.
    std::vector<int> digit(static_cast<std::size_t>(ambient_), -1);
    while (true) {
      for (int k = 0; k < ambient_; ++k)
        probe[static_cast<std::size_t>(k)] =
            base[static_cast<std::size_t>(k)] + digit[static_cast<std::size_t>(k)];
      auto it = cells_.find(fnv1a(probe));
      if (it != cells_.end())
        for (int id : it->second) consider(id);
      int k = 0;
      while (k < ambient_ && digit[static_cast<std::size_t>(k)] == 1) {
        digit[static_cast<std::size_t>(k)] = -1;
        ++k;
      }
      if (k == ambient_) break;
      digit[static_cast<std::size_t>(k)] += 1;
    }
  }

  if (best >= 0 && dist_out != nullptr) *dist_out = best_dist;
  return best;
}

}  // namespace capdisp
