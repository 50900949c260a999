#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "capdisp/rng.hpp"

namespace capdisp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A point on S^d, stored as a unit vector in R^{d+1}. The constructor
// normalizes (file-loaded coordinates carry decimal rounding) and rejects
// near-zero input.
class UnitVector {
 public:
  explicit UnitVector(Vec coords);
  const Vec& vec() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()) - 1; }  // sphere dimension d

 private:
  Vec v_;
};

// Ordered point set on S^d. Points are the columns of X (ambient dim d+1),
// all normalized on construction.
struct PointSet {
  int d = 0;
  Mat X;  // (d+1) x n
  std::string label;

  int n() const { return static_cast<int>(X.cols()); }
  Vec point(int i) const { return X.col(i); }
};

PointSet make_point_set(int d, Mat columns, std::string label = {});
PointSet make_point_set(int d, const std::vector<Vec>& points, std::string label = {});

struct Cap {
  Vec center;     // unit vector in R^{d+1}
  double radius;  // geodesic radius in [0, pi]

  int dim() const { return static_cast<int>(center.size()) - 1; }
};

Cap make_cap(Vec center, double radius);

// Intersection of k >= 1 caps sharing the same ambient dimension.
struct Lens {
  std::vector<Cap> caps;
};

Lens make_lens(std::vector<Cap> caps);

double geodesic_distance(const Vec& x, const Vec& y);
double geodesic_distance(const UnitVector& x, const UnitVector& y);

bool cap_contains(const Cap& c, const Vec& y);
bool lens_contains(const Lens& l, const Vec& y);

// n i.i.d. uniform points on S^d (normalized Gaussian vectors).
PointSet sample_uniform(int d, int n, Rng& rng);
Vec sample_uniform_point(int ambient_dim, Rng& rng);

// Q must be orthogonal within 1e-10; points are mapped and renormalized.
PointSet apply_rotation(const PointSet& p, const Mat& q);

// Haar-ish random orthogonal matrix (QR of a Gaussian matrix, signs fixed).
Mat random_rotation(int ambient_dim, Rng& rng);

// JSON object {"d": int, "n": int, "points": [[...], ...]}; CSV is one point
// per row. Both round-trip losslessly at 17 significant digits.
std::string point_set_to_json(const PointSet& p);
PointSet point_set_from_json(const std::string& text);
std::string point_set_to_csv(const PointSet& p);
PointSet point_set_from_csv(const std::string& text);
void save_point_set(const PointSet& p, const std::string& path);  // .csv by extension, else JSON
PointSet load_point_set(const std::string& path);

}  // namespace capdisp
