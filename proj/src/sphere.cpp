#include "capdisp/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace capdisp {

namespace {

Vec normalized_or_throw(Vec v, const char* what) {
  double norm = v.norm();
  if (!(norm > 1e-14) || !std::isfinite(norm)) {
    throw std::invalid_argument(std::string(what) + ": vector norm too small to normalize");
  }
  // Idempotent: leave vectors that are already unit length alone, so that a
  // normalize -> serialize -> parse -> normalize round trip is bit-exact.
  if (std::abs(norm - 1.0) <= 1e-12) return v;
  return v / norm;
}

}  // namespace

UnitVector::UnitVector(Vec coords) : v_(normalized_or_throw(std::move(coords), "UnitVector")) {
  if (v_.size() < 2) throw std::invalid_argument("UnitVector: ambient dimension must be >= 2");
}

PointSet make_point_set(int d, Mat columns, std::string label) {
  if (d < 1) throw std::invalid_argument("PointSet: d must be >= 1");
  if (columns.rows() != d + 1) throw std::invalid_argument("PointSet: coordinate length must be d+1");
  if (columns.cols() < 1) throw std::invalid_argument("PointSet: need at least one point");
  for (int i = 0; i < columns.cols(); ++i) {
    columns.col(i) = normalized_or_throw(columns.col(i), "PointSet");
  }
  return PointSet{d, std::move(columns), std::move(label)};
}

PointSet make_point_set(int d, const std::vector<Vec>& points, std::string label) {
  if (points.empty()) throw std::invalid_argument("PointSet: need at least one point");
  Mat x(d + 1, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d + 1) {
      throw std::invalid_argument("PointSet: coordinate length must be d+1");
    }
    x.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  return make_point_set(d, std::move(x), std::move(label));
}

Cap make_cap(Vec center, double radius) {
  if (!(radius >= 0.0 && radius <= M_PI)) throw std::invalid_argument("Cap: radius must lie in [0, pi]");
  return Cap{normalized_or_throw(std::move(center), "Cap"), radius};
}

Lens make_lens(std::vector<Cap> caps) {
  if (caps.empty()) throw std::invalid_argument("Lens: need k >= 1 caps");
  for (const Cap& c : caps) {
    if (c.center.size() != caps.front().center.size()) {
      throw std::invalid_argument("Lens: caps must share the ambient dimension");
    }
  }
  return Lens{std::move(caps)};
}

double geodesic_distance(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("geodesic_distance: dimension mismatch");
  double c = x.dot(y);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

double geodesic_distance(const UnitVector& x, const UnitVector& y) {
  return geodesic_distance(x.vec(), y.vec());
}

bool cap_contains(const Cap& c, const Vec& y) {
  return geodesic_distance(c.center, y) <= c.radius;
}

bool lens_contains(const Lens& l, const Vec& y) {
  for (const Cap& c : l.caps) {
    if (!cap_contains(c, y)) return false;
  }
  return true;
}

Vec sample_uniform_point(int ambient_dim, Rng& rng) {
  Vec g(ambient_dim);
  for (;;) {
    for (int k = 0; k < ambient_dim; ++k) g[k] = rng.gaussian();
    double norm = g.norm();
    if (norm > 1e-12) return g / norm;
  }
}

PointSet sample_uniform(int d, int n, Rng& rng) {
  if (d < 1) throw std::invalid_argument("sample_uniform: d must be >= 1");
  if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
  Mat x(d + 1, n);
  for (int i = 0; i < n; ++i) x.col(i) = sample_uniform_point(d + 1, rng);
  return PointSet{d, std::move(x), {}};
}

PointSet apply_rotation(const PointSet& p, const Mat& q) {
  int m = p.d + 1;
  if (q.rows() != m || q.cols() != m) throw std::invalid_argument("apply_rotation: matrix shape mismatch");
  double defect = (q.transpose() * q - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw std::invalid_argument("apply_rotation: matrix not orthogonal within 1e-10");
  return make_point_set(p.d, q * p.X, p.label);
}

Mat random_rotation(int ambient_dim, Rng& rng) {
  Mat g(ambient_dim, ambient_dim);
  for (int i = 0; i < ambient_dim; ++i)
    for (int j = 0; j < ambient_dim; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < ambient_dim; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

namespace {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PointSet point_set_from_rows(const std::vector<std::vector<double>>& rows, const std::string& label) {
  if (rows.empty()) throw std::invalid_argument("PointSet parse: no points");
  const std::size_t m = rows.front().size();
  if (m < 2) throw std::invalid_argument("PointSet parse: ambient dimension must be >= 2");
  Mat x(m, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m) throw std::invalid_argument("PointSet parse: ragged coordinate rows");
    for (std::size_t k = 0; k < m; ++k) x(k, i) = rows[i][k];
  }
  return make_point_set(static_cast<int>(m) - 1, std::move(x), label);
}

}  // namespace

std::string point_set_to_json(const PointSet& p) {
  // Doubles are emitted via %.17g so the text round-trips bit-exactly.
  std::ostringstream out;
  out << "{\"d\": " << p.d << ", \"n\": " << p.n();
  if (!p.label.empty()) out << ", \"label\": " << nlohmann::json(p.label).dump();
  out << ", \"points\": [";
  for (int i = 0; i < p.n(); ++i) {
    out << (i ? ", [" : "[");
    for (int k = 0; k <= p.d; ++k) out << (k ? ", " : "") << format_real(p.X(k, i));
    out << "]";
  }
  out << "]}";
  return out.str();
}

PointSet point_set_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("points")) throw std::invalid_argument("PointSet JSON: missing \"points\"");
  std::vector<std::vector<double>> rows = j.at("points").get<std::vector<std::vector<double>>>();
  std::string label = j.value("label", std::string{});
  PointSet p = point_set_from_rows(rows, label);
  if (j.contains("d") && j.at("d").get<int>() != p.d) {
    throw std::invalid_argument("PointSet JSON: \"d\" does not match coordinate length");
  }
  if (j.contains("n") && j.at("n").get<int>() != p.n()) {
    throw std::invalid_argument("PointSet JSON: \"n\" does not match point count");
  }
  return p;
}

std::string point_set_to_csv(const PointSet& p) {
  std::ostringstream out;
  for (int i = 0; i < p.n(); ++i) {
    for (int k = 0; k <= p.d; ++k) out << (k ? "," : "") << format_real(p.X(k, i));
    out << "\n";
  }
  return out.str();
}

PointSet point_set_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return point_set_from_rows(rows, {});
}

void save_point_set(const PointSet& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  bool csv = path.size() > 4 && path.substr(path.size() - 4) == ".csv";
  out << (csv ? point_set_to_csv(p) : point_set_to_json(p));
  if (!csv) out << "\n";
}

PointSet load_point_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  bool csv = path.size() > 4 && path.substr(path.size() - 4) == ".csv";
  return csv ? point_set_from_csv(buf.str()) : point_set_from_json(buf.str());
}

}  // namespace capdisp
