#include "capdisp/configurations.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "capdisp/sphere_grid.hpp"

namespace capdisp {

ConfigKind config_kind_from_string(const std::string& s) {
  if (s == "simplex") return ConfigKind::simplex;
  if (s == "cross_polytope" || s == "cross") return ConfigKind::cross_polytope;
  if (s == "block_simplices" || s == "blocks") return ConfigKind::block_simplices;
  if (s == "random_uniform" || s == "random" || s == "uniform")
    return ConfigKind::random_uniform;
  if (s == "greedy_net" || s == "net") return ConfigKind::greedy_net;
  if (s == "from_file" || s == "file") return ConfigKind::from_file;
  throw std::invalid_argument("unknown configuration kind: " + s);
}

std::string to_string(ConfigKind kind) {
  switch (kind) {
    case ConfigKind::simplex: return "simplex";
    case ConfigKind::cross_polytope: return "cross_polytope";
    case ConfigKind::block_simplices: return "block_simplices";
    case ConfigKind::random_uniform: return "random_uniform";
    case ConfigKind::greedy_net: return "greedy_net";
    case ConfigKind::from_file: return "from_file";
  }
  throw std::logic_error("unreachable configuration kind");
}

namespace {

// Vertices of a regular m-simplex (m+1 unit vectors in R^m with pairwise
// inner product -1/m), as columns.
Mat simplex_columns(int m) {
  Mat out(m, m + 1);
  // Vertex i is e_i of R^{m+1} minus the centroid, rescaled to unit length,
  // written in the Helmert basis h_k = (1,..,1,-k,0,..,0)/sqrt(k(k+1)) of the
  // sum-zero hyperplane. <e_i, h_k> has the closed form used below, and the
  // centroid is orthogonal to every h_k.
  const double scale = std::sqrt((m + 1.0) / m);  // 1 / |e_i - centroid|
  for (int i = 0; i < m + 1; ++i) {
    for (int k = 1; k <= m; ++k) {
      double dot;
      if (i + 1 <= k)
        dot = 1.0 / std::sqrt(k * (k + 1.0));
      else if (i + 1 == k + 1)
        dot = -k / std::sqrt(k * (k + 1.0));
      else
        dot = 0.0;
      out(k - 1, i) = dot * scale;
    }
  }
  return out;
}

}  // namespace

PointSet regular_simplex(int d) {
  if (d < 1) throw std::invalid_argument("regular_simplex requires d >= 1");
  const Mat cols = simplex_columns(d + 1);
  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(d) + 2);
  for (int i = 0; i < d + 2; ++i) points.push_back(cols.col(i));
  return make_point_set(d, points, "simplex");
}

PointSet cross_polytope(int d) {
  if (d < 1) throw std::invalid_argument("cross_polytope requires d >= 1");
  std::vector<Vec> points;
  points.reserve(2 * (static_cast<std::size_t>(d) + 1));
  for (int i = 0; i < d + 1; ++i) {
    Vec plus = Vec::Zero(d + 1);
    plus[i] = 1.0;
    points.push_back(plus);
    points.push_back(-plus);
  }
  return make_point_set(d, points, "cross_polytope");
}

PointSet block_simplices(int d, int n) {
  if (d < 1) throw std::invalid_argument("block_simplices requires d >= 1");
  const int k = n - d - 1;
  if (k < 1 || k > d + 1)
    throw std::invalid_argument("block_simplices requires d+2 <= n <= 2d+2");

  const int m = d + 1;  // ambient coordinates to distribute
  const int big = (m + k - 1) / k;
  const int small = m / k;
  const int r = m % k;  // this many leading blocks take the larger size

  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(n));
  int offset = 0;
  for (int b = 0; b < k; ++b) {
    const int size = b < r ? big : small;
    if (size == 1) {
      // A 0-dimensional sphere: the pair of signed unit coordinates.
      for (double sign : {1.0, -1.0}) {
        Vec v = Vec::Zero(m);
        v[offset] = sign;
        points.push_back(v);
      }
    } else {
      const Mat cols = simplex_columns(size);
      for (int i = 0; i < size + 1; ++i) {
        Vec v = Vec::Zero(m);
        v.segment(offset, size) = cols.col(i);
        points.push_back(v);
      }
    }
    offset += size;
  }
  return make_point_set(d, points, "block_simplices");
}

PointSet random_uniform(int d, int n, Rng& rng) {
  if (d < 1 || n < 1)
    throw std::invalid_argument("random_uniform requires d >= 1 and n >= 1");
  PointSet ps = sample_uniform(d, n, rng);
  ps.label = "random_uniform";
  return ps;
}

PointSet greedy_net(int d, double eps, Rng& rng, const GreedyNetOptions& opts) {
  if (d < 1) throw std::invalid_argument("greedy_net requires d >= 1");
  if (!(eps > 0.0) || !(eps < 3.14159265358979323846))
    throw std::invalid_argument("greedy_net requires eps in (0, pi)");

  SphereGrid grid(d + 1, eps);
  std::int64_t consecutive_rejections = 0;
  while (true) {
    const std::int64_t budget = std::min(
        opts.rejections_per_point * std::max<std::int64_t>(1, grid.size()),
        opts.rejection_cap);
    if (consecutive_rejections >= budget) break;
    if (opts.max_points >= 0 && grid.size() >= opts.max_points) break;
    const Vec candidate = sample_uniform_point(d + 1, rng);
    if (grid.has_within(candidate, eps)) {
      consecutive_rejections += 1;
    } else {
      grid.insert(candidate);
      consecutive_rejections = 0;
    }
  }

  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) points.push_back(grid.point(i));
  return make_point_set(d, points, "greedy_net");
}

PointSet make_configuration(const ConfigSpec& spec) {
  switch (spec.kind) {
    case ConfigKind::simplex:
      if (spec.n != 0 && spec.n != spec.d + 2)
        throw std::invalid_argument("simplex has exactly d+2 points");
      return regular_simplex(spec.d);
    case ConfigKind::cross_polytope:
      if (spec.n != 0 && spec.n != 2 * spec.d + 2)
        throw std::invalid_argument("cross_polytope has exactly 2d+2 points");
      return cross_polytope(spec.d);
    case ConfigKind::block_simplices:
      return block_simplices(spec.d, spec.n);
    case ConfigKind::random_uniform: {
      Rng rng(spec.seed);
      return random_uniform(spec.d, spec.n, rng);
    }
    case ConfigKind::greedy_net: {
      Rng rng(spec.seed);
      return greedy_net(spec.d, spec.eps, rng);
    }
    case ConfigKind::from_file:
      if (spec.path.empty())
        throw std::invalid_argument("from_file requires a path");
      return load_point_set(spec.path);
  }
  throw std::logic_error("unreachable configuration kind");
}

}  // namespace capdisp
