#include "capdisp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "capdisp/lp.hpp"
#include "capdisp/parallel.hpp"
#include "capdisp/quadrature.hpp"
#include "capdisp/volume.hpp"

namespace capdisp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::exact_enum: return "exact_enum";
    case SolveMethod::minimax_opt: return "minimax_opt";
    case SolveMethod::monte_carlo: return "monte_carlo";
    case SolveMethod::lens_search: return "lens_search";
  }
  throw std::logic_error("unreachable solve method");
}

double SupportProblem::value(const Vec& u) const {
  return (P_->X.transpose() * u).maxCoeff();
}

int SupportProblem::argmax(const Vec& u) const {
  Eigen::Index idx = 0;
  (P_->X.transpose() * u).maxCoeff(&idx);
  return static_cast<int>(idx);
}

std::vector<int> SupportProblem::active_set(const Vec& u, double tol) const {
  const Vec dots = P_->X.transpose() * u;
  const double mx = dots.maxCoeff();
  std::vector<int> out;
  for (Eigen::Index i = 0; i < dots.size(); ++i)
    if (dots[i] >= mx - tol) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

double binomial_count(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i);
    r /= static_cast<double>(i);
    if (r > 1e18) return 1e18;
  }
  return r;
}

// sign * max_i <x_i, u>, abandoning the scan once the running max exceeds
// bail; the returned partial value is then only a lower bound on f, which is
// enough to discard the candidate (strictly worse than the incumbent).
double support_scan(const Mat& X, const double* u, double sign, double bail) {
  const int D = static_cast<int>(X.rows());
  const int n = static_cast<int>(X.cols());
  const double* data = X.data();
  double mx = -kInf;
  for (int i = 0; i < n; ++i) {
    const double* col = data + static_cast<std::ptrdiff_t>(i) * D;
    double dot = 0.0;
    for (int k = 0; k < D; ++k) dot += col[k] * u[k];
    dot *= sign;
    if (dot > mx) {
      mx = dot;
      if (mx > bail) return mx;
    }
  }
  return mx;
}

struct SubsetScan {
  double best = kInf;
  std::int64_t order = -1;
  Vec u;
  double sign = 1.0;
  std::int64_t degenerate = 0;
  std::int64_t scored = 0;
};

void atomic_min(std::atomic<double>& target, double value) {
  double cur = target.load(std::memory_order_relaxed);
  while (value < cur &&
         !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

// Scores the equidistance normals of all (d+1)-subsets whose smallest member
// is i0. The tie-break order is the canonical enumeration order, so combining
// chunks lexicographically by (value, order) reproduces a serial scan.
SubsetScan scan_first_index(const Mat& X, int i0, std::atomic<double>& global_bail) {
  const int D = static_cast<int>(X.rows());
  const int d = D - 1;
  const int n = static_cast<int>(X.cols());
  SubsetScan out;

  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) idx[static_cast<std::size_t>(j)] = i0 + 1 + j;
  if (idx.back() > n - 1) return out;

  const double* data = X.data();
  Mat diff(d, D);
  Vec cand(D);
  std::int64_t counter = 0;

  while (true) {
    bool have = false;
    if (D == 3) {
      const double* x0 = data + static_cast<std::ptrdiff_t>(i0) * 3;
      const double* x1 = data + static_cast<std::ptrdiff_t>(idx[0]) * 3;
      const double* x2 = data + static_cast<std::ptrdiff_t>(idx[1]) * 3;
      const double a0 = x1[0] - x0[0], a1 = x1[1] - x0[1], a2 = x1[2] - x0[2];
      const double b0 = x2[0] - x0[0], b1 = x2[1] - x0[1], b2 = x2[2] - x0[2];
      const double c0 = a1 * b2 - a2 * b1;
      const double c1 = a2 * b0 - a0 * b2;
      const double c2 = a0 * b1 - a1 * b0;
      const double cn = std::sqrt(c0 * c0 + c1 * c1 + c2 * c2);
      const double an = std::sqrt(a0 * a0 + a1 * a1 + a2 * a2);
      const double bn = std::sqrt(b0 * b0 + b1 * b1 + b2 * b2);
      if (cn > 1e-10 * std::max(an * bn, 1e-30)) {
        cand[0] = c0 / cn;
        cand[1] = c1 / cn;
        cand[2] = c2 / cn;
        have = true;
      }
    } else {
      for (int j = 0; j < d; ++j)
        diff.row(j) =
            (X.col(idx[static_cast<std::size_t>(j)]) - X.col(i0)).transpose();
      Eigen::FullPivLU<Mat> lu(diff);
      lu.setThreshold(1e-10);
      if (lu.rank() == d) {
        cand = lu.kernel().col(0).normalized();
        have = true;
      }
    }

    if (!have) {
      ++out.degenerate;
    } else {
      for (int s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        const double bail =
            std::min(out.best, global_bail.load(std::memory_order_relaxed));
        const double f = support_scan(X, cand.data(), sign, bail);
        ++out.scored;
        if (f < out.best) {
          out.best = f;
          out.u = cand;
          out.sign = sign;
          out.order = (static_cast<std::int64_t>(i0) << 32) |
                      static_cast<std::int64_t>(counter << 1) | s;
          atomic_min(global_bail, f);
        }
      }
    }

    ++counter;
    int j = d - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - (d - j)) --j;
    if (j < 0) break;
    ++idx[static_cast<std::size_t>(j)];
    for (int l = j + 1; l < d; ++l)
      idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
  }
  return out;
}

// Minimum-norm point of conv(columns of X), Wolfe's algorithm.
Vec wolfe_min_norm(const Mat& X) {
  const int n = static_cast<int>(X.cols());
  std::vector<int> S{0};
  std::vector<double> lam{1.0};
  Vec x = X.col(0);

  const int max_major = 2 * n + 200;
  for (int major = 0; major < max_major; ++major) {
    Eigen::Index q = 0;
    const double mn = (X.transpose() * x).minCoeff(&q);
    const double sq = x.squaredNorm();
    if (mn >= sq - 3e-15 * std::max(1.0, sq)) break;
    if (std::find(S.begin(), S.end(), static_cast<int>(q)) != S.end()) break;
    S.push_back(static_cast<int>(q));
    lam.push_back(0.0);

    const int minor_cap = 4 * static_cast<int>(S.size()) + 16;
    for (int minor = 0; minor < minor_cap; ++minor) {
      const int k = static_cast<int>(S.size());
      Mat B(X.rows(), k);
      for (int j = 0; j < k; ++j) B.col(j) = X.col(S[static_cast<std::size_t>(j)]);
      Mat K = Mat::Zero(k + 1, k + 1);
      K.topLeftCorner(k, k) = B.transpose() * B;
      K.topRightCorner(k, 1).setOnes();
      K.bottomLeftCorner(1, k).setOnes();
      Vec rhs = Vec::Zero(k + 1);
      rhs[k] = 1.0;
      const Vec sol = K.fullPivLu().solve(rhs);
      const Vec a = sol.head(k);
      if (!a.allFinite()) break;

      if (a.minCoeff() > 1e-12) {
        lam.assign(a.data(), a.data() + k);
        x = B * a;
        break;
      }

      double theta = 1.0;
      for (int j = 0; j < k; ++j) {
        if (a[j] > 1e-12) continue;
        const double den = lam[static_cast<std::size_t>(j)] - a[j];
        if (den > 1e-300)
          theta = std::min(theta, lam[static_cast<std::size_t>(j)] / den);
      }
      bool dropped = false;
      for (int j = k - 1; j >= 0; --j) {
        const std::size_t uj = static_cast<std::size_t>(j);
        lam[uj] = (1.0 - theta) * lam[uj] + theta * a[j];
        if (lam[uj] <= 1e-12) {
          lam.erase(lam.begin() + j);
          S.erase(S.begin() + j);
          dropped = true;
        }
      }
      double sum = 0.0;
      for (double l : lam) sum += l;
      if (sum <= 0.0 || S.empty()) return Vec::Zero(X.rows());
      for (double& l : lam) l /= sum;
      x = Vec::Zero(X.rows());
      for (std::size_t j = 0; j < S.size(); ++j) x += lam[j] * X.col(S[j]);
      if (!dropped) break;
    }
  }
  return x;
}

// Searches for a nonzero direction with all inner products <= 0 (the polar
// cone of the point set). Any such direction has a coordinate of largest
// magnitude, so fixing u_k = +-1 and boxing the rest covers all of them.
bool polar_cone_direction(const Mat& X, Vec* out) {
  const int D = static_cast<int>(X.rows());
  const int n = static_cast<int>(X.cols());
  const int d = D - 1;
  const double box = std::sqrt(static_cast<double>(D));

  for (int k = 0; k < D; ++k) {
    for (const double s : {1.0, -1.0}) {
      Mat A = Mat::Zero(n + d, d);
      Vec b(n + d);
      const Vec c = Vec::Zero(d);
      for (int i = 0; i < n; ++i) {
        double rhs = -s * X(k, i);
        int col = 0;
        for (int j = 0; j < D; ++j) {
          if (j == k) continue;
          A(i, col) = X(j, i);
          rhs += box * X(j, i);
          ++col;
        }
        b[i] = rhs;
      }
      for (int j = 0; j < d; ++j) {
        A(n + j, j) = 1.0;
        b[n + j] = 2.0 * box;
      }
      const LpResult r = solve_lp_max(A, b, c);
      if (r.status != LpStatus::optimal) continue;
      Vec u(D);
      int col = 0;
      for (int j = 0; j < D; ++j) u[j] = j == k ? s : r.x[col++] - box;
      if ((X.transpose() * u).maxCoeff() <= 1e-9 * std::max(1.0, u.norm())) {
        *out = u / u.norm();
        return true;
      }
    }
  }
  return false;
}

}  // namespace

DispersionResult covering_radius_exact(const PointSet& P, const ExactOptions& opts) {
  const int d = P.d;
  const int D = d + 1;
  const int n = P.n();

  DispersionResult res;
  res.method = SolveMethod::exact_enum;
  res.certified = true;

  if (n == 1) {
    res.covering_radius = kPi;
    res.value = 1.0;
    res.witness = make_cap(-P.point(0), kPi);
    res.diagnostics["subsets_examined"] = 0.0;
    res.diagnostics["degenerate_subsets"] = 0.0;
    return res;
  }

  const double subsets = binomial_count(n, D);
  if (subsets > static_cast<double>(opts.subset_budget))
    throw std::invalid_argument(
        "covering_radius_exact: C(n, d+1) exceeds the subset budget");

  const std::int64_t chunks = std::max(0, n - D + 1);
  std::vector<SubsetScan> slots(static_cast<std::size_t>(chunks));
  std::atomic<double> global_bail(kInf);
  run_chunks(chunks, [&](std::int64_t c) {
    slots[static_cast<std::size_t>(c)] =
        scan_first_index(P.X, static_cast<int>(c), global_bail);
  });

  double best = kInf;
  Vec best_u;
  std::int64_t degenerate = 0;
  std::int64_t scored = 0;
  for (const SubsetScan& s : slots) {
    degenerate += s.degenerate;
    scored += s.scored;
    if (s.order >= 0 && s.best < best) {
      best = s.best;
      best_u = s.sign * s.u;
    }
  }

  const Vec W = wolfe_min_norm(P.X);
  const double wnorm = W.norm();
  if (wnorm > 1e-10) {
    const Vec u = -W / wnorm;
    const double f = support_scan(P.X, u.data(), 1.0, kInf);
    ++scored;
    if (f < best) {
      best = f;
      best_u = u;
    }
  }

  bool zero_cert = false;
  Vec zero_u;
  if (wnorm <= 1e-6) zero_cert = polar_cone_direction(P.X, &zero_u);

  if (zero_cert && best > -1e-9) {
    res.covering_radius = 0.5 * kPi;
    res.value = 0.5;
    res.witness = make_cap(zero_u, res.covering_radius);
  } else if (best < kInf) {
    res.covering_radius = std::acos(std::clamp(best, -1.0, 1.0));
    res.value = cap_volume(d, res.covering_radius);
    res.witness = make_cap(best_u, res.covering_radius);
  } else {
    throw std::runtime_error("degenerate configuration");
  }

  res.diagnostics["subsets_examined"] = subsets;
  res.diagnostics["degenerate_subsets"] = static_cast<double>(degenerate);
  res.diagnostics["candidates_scored"] = static_cast<double>(scored);
  res.diagnostics["min_norm_point"] = wnorm;
  res.diagnostics["boundary_certificate"] = zero_cert ? 1.0 : 0.0;
  return res;
}

namespace {

void consider_direction(const Mat& X, const Vec& dir, double& best_f, Vec& best_u) {
  const double norm = dir.norm();
  if (norm < 1e-12) return;
  const Vec u = dir / norm;
  const double f = (X.transpose() * u).maxCoeff();
  if (f < best_f) {
    best_f = f;
    best_u = u;
  }
}

// Refines a near-optimal direction by projecting it onto the set of
// directions equidistant (in inner product) to the active points; with a full
// active set this lands exactly on an equidistance normal.
void active_set_polish(const PointSet& P, double& best_f, Vec& best_u) {
  const int D = P.d + 1;
  SupportProblem prob(P);
  for (const double tol : {1e-7, 1e-4, 1e-2}) {
    const std::vector<int> A = prob.active_set(best_u, tol);
    if (A.size() <= 1) {
      consider_direction(P.X, -P.X.col(A.empty() ? 0 : A[0]), best_f, best_u);
      continue;
    }
    const int rows = static_cast<int>(A.size()) - 1;
    Mat diff(rows, D);
    for (int j = 0; j < rows; ++j)
      diff.row(j) = (P.X.col(A[static_cast<std::size_t>(j) + 1]) - P.X.col(A[0]))
                        .transpose();
    Eigen::FullPivLU<Mat> lu(diff);
    lu.setThreshold(1e-10);
    const int nullity = static_cast<int>(lu.dimensionOfKernel());
    if (nullity == 0) continue;
    const Mat ker = lu.kernel();
    Eigen::HouseholderQR<Mat> qr(ker);
    const Mat Q = qr.householderQ() * Mat::Identity(D, nullity);
    consider_direction(P.X, Q * (Q.transpose() * best_u), best_f, best_u);
    if (nullity == 1) {
      consider_direction(P.X, ker.col(0), best_f, best_u);
      consider_direction(P.X, -ker.col(0), best_f, best_u);
    }
  }
}

// Enumerates the equidistance normals of every (d+1)-subset of the points
// closest to best_u in inner product and keeps the best over the full set,
// repeating while that improves. Subgradient restarts locate the right basin
// to ~1e-3; this step snaps the incumbent onto the exact stationary direction
// of that basin, which is always such a normal for a generic point set.
void local_subset_refine(const Mat& X, double& best_f, Vec& best_u) {
  const int D = static_cast<int>(X.rows());
  const int d = D - 1;
  const int n = static_cast<int>(X.cols());
  if (n < D || best_u.size() != D) return;
  const int k = std::min(n, 2 * D);

  for (int round = 0; round < 6; ++round) {
    const double before = best_f;
    const Vec dots = X.transpose() * best_u;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](int a, int b) { return dots[a] > dots[b]; });

    std::vector<int> pick(static_cast<std::size_t>(D));
    std::iota(pick.begin(), pick.end(), 0);
    Mat diff(d, D);
    while (true) {
      for (int j = 0; j < d; ++j)
        diff.row(j) = (X.col(order[static_cast<std::size_t>(pick[static_cast<std::size_t>(j + 1)])]) -
                       X.col(order[static_cast<std::size_t>(pick[0])]))
                          .transpose();
      Eigen::FullPivLU<Mat> lu(diff);
      lu.setThreshold(1e-10);
      if (lu.rank() == d) {
        const Vec cand = lu.kernel().col(0).normalized();
        consider_direction(X, cand, best_f, best_u);
        consider_direction(X, -cand, best_f, best_u);
      }
      int j = D - 1;
      while (j >= 0 && pick[static_cast<std::size_t>(j)] == k - (D - j)) --j;
      if (j < 0) break;
      ++pick[static_cast<std::size_t>(j)];
      for (int l = j + 1; l < D; ++l)
        pick[static_cast<std::size_t>(l)] = pick[static_cast<std::size_t>(l - 1)] + 1;
    }
    if (best_f >= before - 1e-15) break;
  }
}

struct RestartOutcome {
  double f = kInf;
  Vec u;
  std::int64_t iterations = 0;
  bool polished = false;
};

}  // namespace

DispersionResult covering_radius_opt(const PointSet& P, int restarts, Rng& rng) {
  if (restarts < 1)
    throw std::invalid_argument("covering_radius_opt requires restarts >= 1");
  const int d = P.d;
  const int D = d + 1;
  SupportProblem prob(P);
  const Rng base = rng;

  std::vector<RestartOutcome> slots(static_cast<std::size_t>(restarts));
  run_chunks(restarts, [&](std::int64_t r) {
    Rng child = base.derive(static_cast<std::uint64_t>(r));
    RestartOutcome out;
    Vec u = sample_uniform_point(D, child);
    out.f = prob.value(u);
    out.u = u;

    std::vector<int> prev_active;
    int stable = 0;
    for (int t = 1; t <= 2000; ++t) {
      ++out.iterations;
      Eigen::Index ai = 0;
      const double mx = (P.X.transpose() * u).maxCoeff(&ai);
      const Vec g = P.X.col(ai) - mx * u;  // tangent part of the subgradient
      const double step = 0.5 / std::sqrt(static_cast<double>(t));
      u = (u - step * g).normalized();
      const double f = prob.value(u);
      if (f < out.f) {
        out.f = f;
        out.u = u;
      }
      std::vector<int> active = prob.active_set(u, 1e-7);
      if (active == prev_active) {
        ++stable;
      } else {
        stable = 0;
        prev_active = std::move(active);
      }
      if (stable >= 25) break;
    }

    const double before = out.f;
    for (int round = 0; round < 3; ++round) {
      const double prev = out.f;
      active_set_polish(P, out.f, out.u);
      if (out.f >= prev - 1e-15) break;
    }
    out.polished = out.f < before - 1e-15;
    slots[static_cast<std::size_t>(r)] = std::move(out);
  });

  double best = kInf;
  Vec best_u;
  std::int64_t total_iters = 0;
  std::int64_t polish_hits = 0;
  for (const RestartOutcome& out : slots) {
    total_iters += out.iterations;
    if (out.polished) ++polish_hits;
    if (out.f < best) {
      best = out.f;
      best_u = out.u;
    }
  }

  // Deterministic extra candidate: opposite the centroid, polished. Included
  // for every restart count, so results stay monotone in `restarts`.
  const Vec centroid = P.X.rowwise().sum() / static_cast<double>(P.n());
  if (centroid.norm() > 1e-12) {
    double cf = kInf;
    Vec cu;
    consider_direction(P.X, -centroid, cf, cu);
    for (int round = 0; round < 3 && cu.size() > 0; ++round) {
      const double prev = cf;
      active_set_polish(P, cf, cu);
      if (cf >= prev - 1e-15) break;
    }
    if (cf < best) {
      best = cf;
      best_u = cu;
    }
  }

  local_subset_refine(P.X, best, best_u);

  DispersionResult res;
  res.method = SolveMethod::minimax_opt;
  res.certified = false;
  res.covering_radius = std::acos(std::clamp(best, -1.0, 1.0));
  res.value = cap_volume(d, res.covering_radius);
  res.witness = make_cap(best_u, res.covering_radius);
  res.diagnostics["restarts"] = static_cast<double>(restarts);
  res.diagnostics["iterations"] = static_cast<double>(total_iters);
  res.diagnostics["polish_improvements"] = static_cast<double>(polish_hits);
  return res;
}

DispersionResult dispersion_monte_carlo(const PointSet& P, std::int64_t samples,
                                        Rng& rng) {
  if (samples < 1)
    throw std::invalid_argument("dispersion_monte_carlo requires samples >= 1");
  const int d = P.d;
  const int D = d + 1;
  const int n = P.n();
  const std::int64_t batch = 4096;
  const std::int64_t nbatches = (samples + batch - 1) / batch;
  const Rng base = rng;

  struct BatchBest {
    double mindot = 2.0;
    Vec y;
  };
  std::vector<BatchBest> slots(static_cast<std::size_t>(nbatches));
  run_chunks(nbatches, [&](std::int64_t k) {
    Rng child = base.derive(static_cast<std::uint64_t>(k));
    const std::int64_t count = std::min(batch, samples - k * batch);
    BatchBest bb;
    const double* data = P.X.data();
    for (std::int64_t s = 0; s < count; ++s) {
      const Vec y = sample_uniform_point(D, child);
      double mx = -kInf;
      for (int i = 0; i < n; ++i) {
        const double* col = data + static_cast<std::ptrdiff_t>(i) * D;
        double dot = 0.0;
        for (int kk = 0; kk < D; ++kk) dot += col[kk] * y[kk];
        if (dot > mx) {
          mx = dot;
          if (mx >= bb.mindot) break;  // cannot beat this batch's best hole
        }
      }
      if (mx < bb.mindot) {
        bb.mindot = mx;
        bb.y = y;
      }
    }
    slots[static_cast<std::size_t>(k)] = std::move(bb);
  });

  double mindot = 2.0;
  Vec best_y;
  for (const BatchBest& bb : slots) {
    if (bb.mindot < mindot) {
      mindot = bb.mindot;
      best_y = bb.y;
    }
  }

  DispersionResult res;
  res.method = SolveMethod::monte_carlo;
  res.certified = false;
  res.covering_radius = std::acos(std::clamp(mindot, -1.0, 1.0));
  res.value = cap_volume(d, res.covering_radius);
  res.witness = make_cap(best_y, res.covering_radius);
  res.diagnostics["samples"] = static_cast<double>(samples);
  res.diagnostics["batches"] = static_cast<double>(nbatches);
  return res;
}

namespace {

double wrap_angle(double x) {
  const double two_pi = 2.0 * kPi;
  double w = std::fmod(x, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

// Exact arc-intersection volume on the circle.
double circle_lens(const Lens& L) {
  auto arcs_of = [](const Cap& c) {
    std::vector<std::pair<double, double>> segs;
    if (c.radius >= kPi) {
      segs.emplace_back(0.0, 2.0 * kPi);
      return segs;
    }
    const double a = std::atan2(c.center[1], c.center[0]);
    const double lo = wrap_angle(a - c.radius);
    const double hi = lo + 2.0 * c.radius;
    if (hi <= 2.0 * kPi) {
      segs.emplace_back(lo, hi);
    } else {
      segs.emplace_back(lo, 2.0 * kPi);
      segs.emplace_back(0.0, hi - 2.0 * kPi);
    }
    return segs;
  };
  double overlap = 0.0;
  for (const auto& [lo1, hi1] : arcs_of(L.caps[0]))
    for (const auto& [lo2, hi2] : arcs_of(L.caps[1]))
      overlap += std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
  return overlap / (2.0 * kPi);
}

}  // namespace

double lens_volume(const Lens& L, bool* converged) {
  if (converged) *converged = true;
  const std::size_t k = L.caps.size();
  if (k < 1 || k > 2)
    throw std::invalid_argument("lens_volume supports one or two caps");
  const int d = L.caps[0].dim();
  if (k == 1) return cap_volume(d, L.caps[0].radius);
  if (d == 1) return circle_lens(L);

  double r1 = L.caps[0].radius;
  double r2 = L.caps[1].radius;
  Vec c1 = L.caps[0].center;
  Vec c2 = L.caps[1].center;
  if (r1 > r2) {
    std::swap(r1, r2);
    std::swap(c1, c2);
  }
  const double psi = geodesic_distance(c1, c2);
  if (r1 <= 0.0) return 0.0;
  if (psi >= r1 + r2) return 0.0;
  if (psi + r1 <= r2) return cap_volume(d, r1);
  if (psi <= 1e-14) return cap_volume(d, r1);
  if (psi >= kPi - 1e-14)
    return std::max(0.0, cap_volume(d, r1) - cap_volume(d, kPi - r2));

  // Slice by the polar angle theta from c1; the cross-section at theta is a
  // (d-1)-sphere of which the second cap claims a sub-cap. The integrand has
  // kinks where that sub-cap appears or swallows the whole cross-section.
  std::vector<double> brk = {0.0, r1};
  for (const double t :
       {std::fabs(psi - r2), psi + r2, 2.0 * kPi - psi - r2})
    if (t > 1e-13 && t < r1 - 1e-13) brk.push_back(t);
  std::sort(brk.begin(), brk.end());

  const double cos_r2 = std::cos(r2);
  const double cos_psi = std::cos(psi);
  const double sin_psi = std::sin(psi);
  auto cross_section = [&](double theta) {
    const double num = cos_r2 - std::cos(theta) * cos_psi;
    const double den = std::sin(theta) * sin_psi;
    double q;
    if (den < 1e-300) {
      q = num > 0.0 ? 0.0 : 1.0;
    } else {
      const double t = num / den;
      if (t >= 1.0)
        q = 0.0;
      else if (t <= -1.0)
        q = 1.0;
      else
        q = cap_volume(d - 1, std::acos(t));
    }
    return q * std::pow(std::sin(theta), d - 1);
  };

  std::int64_t nodes = 0;
  const std::int64_t node_cap = 1 << 20;
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < brk.size(); ++seg) {
    const double a = brk[seg];
    const double b = brk[seg + 1];
    if (b - a < 1e-15) continue;
    // Endpoint-clustering substitution; the kinks sit exactly at segment
    // endpoints where the Jacobian vanishes.
    auto g = [&](double t) {
      const double theta = a + (b - a) * 0.5 * (1.0 - std::cos(kPi * t));
      const double jac = (b - a) * 0.5 * kPi * std::sin(kPi * t);
      return cross_section(theta) * jac;
    };
    int panels = 1;
    double estimate = composite_gauss(g, 0.0, 1.0, 16, panels);
    nodes += 16;
    while (true) {
      panels *= 2;
      if (nodes + 16LL * panels > node_cap) {
        if (converged) *converged = false;
        break;
      }
      const double refined = composite_gauss(g, 0.0, 1.0, 16, panels);
      nodes += 16LL * panels;
      const bool done = std::fabs(refined - estimate) < 2.5e-9;
      estimate = refined;
      if (done) break;
    }
    total += estimate;
  }
  return std::clamp(total / (2.0 * wallis_integral(d)), 0.0, 1.0);
}

namespace {

struct RadiiChoice {
  double r1 = -1.0;
  double r2 = -1.0;
  double vol = -kInf;
};

// For fixed centers, scans a ladder of first radii; the second radius is then
// forced to the largest value excluding every point already inside the first
// cap. All candidate lenses are verified empty before scoring.
RadiiChoice best_empty_radii(const PointSet& P, const Vec& c1, const Vec& c2,
                             std::int64_t& evals) {
  const int n = P.n();
  Vec d1(n), d2(n);
  for (int i = 0; i < n; ++i) {
    d1[i] = geodesic_distance(c1, P.point(i));
    d2[i] = geodesic_distance(c2, P.point(i));
  }
  std::vector<double> sorted(d1.data(), d1.data() + n);
  std::sort(sorted.begin(), sorted.end());

  const double margin = 1e-9;
  std::vector<double> r1s;
  r1s.push_back(sorted[0] - margin);  // plain empty cap, second cap unconstrained
  const int rungs = std::min(12, n);
  for (int q = 1; q <= rungs; ++q) {
    const int pos =
        std::min(n - 1, static_cast<int>(static_cast<double>(q) * n / rungs) - 1);
    if (pos >= 0) r1s.push_back(sorted[static_cast<std::size_t>(pos)]);
  }
  r1s.push_back(kPi);
  std::sort(r1s.begin(), r1s.end());
  r1s.erase(std::unique(r1s.begin(), r1s.end()), r1s.end());

  RadiiChoice best;
  for (const double r1 : r1s) {
    if (r1 <= 0.0) continue;
    const double r1c = std::min(r1, kPi);
    double r2 = kPi;
    for (int i = 0; i < n; ++i)
      if (d1[i] <= r1c) r2 = std::min(r2, d2[i] - margin);
    if (r2 <= 0.0) continue;
    bool empty = true;
    for (int i = 0; i < n; ++i)
      if (d1[i] <= r1c && d2[i] <= r2) {
        empty = false;
        break;
      }
    if (!empty) continue;
    const Lens lens = make_lens({make_cap(c1, r1c), make_cap(c2, r2)});
    ++evals;
    const double vol = lens_volume(lens);
    if (vol > best.vol) best = {r1c, r2, vol};
  }
  return best;
}

struct LensSearchOutcome {
  double vol = -kInf;
  Lens lens;
  std::int64_t evals = 0;
};

LensSearchOutcome lens_local_search(const PointSet& P, Vec c1, Vec c2, Rng& rng) {
  const int D = P.d + 1;
  LensSearchOutcome out;
  RadiiChoice cur = best_empty_radii(P, c1, c2, out.evals);
  (void)rng;

  double h = 0.4;
  while (h > 2e-3) {
    bool improved = false;
    for (int which = 0; which < 2 && !improved; ++which) {
      for (int j = 0; j < D && !improved; ++j) {
        for (const double sgn : {1.0, -1.0}) {
          Vec n1 = c1;
          Vec n2 = c2;
          Vec& moved = which == 0 ? n1 : n2;
          moved[j] += sgn * h;
          const double norm = moved.norm();
          if (norm < 1e-12) continue;
          moved /= norm;
          const RadiiChoice rc = best_empty_radii(P, n1, n2, out.evals);
          if (rc.vol > cur.vol + 1e-12) {
            c1 = n1;
            c2 = n2;
            cur = rc;
            improved = true;
            break;
          }
        }
      }
    }
    if (!improved) h *= 0.5;
  }

  if (cur.vol > -kInf && cur.r1 > 0.0) {
    out.vol = cur.vol;
    out.lens = make_lens({make_cap(c1, cur.r1), make_cap(c2, cur.r2)});
  }
  return out;
}

}  // namespace

DispersionResult lens_dispersion_estimate(const PointSet& P, int restarts, Rng& rng) {
  if (restarts < 1)
    throw std::invalid_argument("lens_dispersion_estimate requires restarts >= 1");
  if (P.n() < 1)
    throw std::invalid_argument("lens_dispersion_estimate requires a nonempty set");
  const int D = P.d + 1;
  const Rng base = rng;

  // A cap is a lens, so the cap search provides both a starting point and a
  // floor for the estimate. Same rng state as the caller would pass to
  // covering_radius_opt directly, for reproducibility.
  Rng opt_rng = base;
  const DispersionResult cap_res = covering_radius_opt(P, restarts, opt_rng);
  const Cap cap_witness = std::get<Cap>(cap_res.witness);

  std::vector<LensSearchOutcome> slots(static_cast<std::size_t>(restarts));
  run_chunks(restarts, [&](std::int64_t r) {
    Rng child = base.derive((1ull << 32) + static_cast<std::uint64_t>(r));
    Vec c1, c2;
    if (r == 0) {
      c1 = cap_witness.center;
      c2 = cap_witness.center;
    } else {
      c1 = sample_uniform_point(D, child);
      Vec jitter(D);
      for (int j = 0; j < D; ++j) jitter[j] = 0.5 * child.gaussian();
      c2 = (c1 + jitter).normalized();
    }
    slots[static_cast<std::size_t>(r)] = lens_local_search(P, c1, c2, child);
  });

  double best_vol = -kInf;
  const Lens* best_lens = nullptr;
  std::int64_t evals = 0;
  for (const LensSearchOutcome& out : slots) {
    evals += out.evals;
    if (out.vol > best_vol && !out.lens.caps.empty()) {
      best_vol = out.vol;
      best_lens = &out.lens;
    }
  }

  DispersionResult res;
  res.method = SolveMethod::lens_search;
  res.certified = false;
  res.covering_radius = cap_res.covering_radius;
  if (best_lens != nullptr && best_vol > cap_res.value) {
    res.value = best_vol;
    res.witness = *best_lens;
  } else {
    res.value = cap_res.value;
    res.witness = cap_witness;
  }
  res.diagnostics["restarts"] = static_cast<double>(restarts);
  res.diagnostics["lens_volume_evaluations"] = static_cast<double>(evals);
  res.diagnostics["cap_search_value"] = cap_res.value;
  return res;
}

}  // namespace capdisp
