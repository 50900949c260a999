#include "capdisp/lp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace capdisp {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::stalled: return "stalled";
  }
  throw std::logic_error("unreachable LP status");
}

LpResult solve_lp_max(const Mat& A, const Vec& b, const Vec& c,
                      const LpOptions& opts) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n)
    throw std::invalid_argument("solve_lp_max: dimension mismatch");

  LpResult res;
  res.x = Vec::Zero(n);
  res.dual = Vec::Zero(m);
  if (m == 0) {
    // No constraints: optimal at 0 unless some objective coefficient is
    // positive, in which case the problem is unbounded above.
    res.status = (n > 0 && c.maxCoeff() > opts.tol) ? LpStatus::unbounded
                                                    : LpStatus::optimal;
    return res;
  }

  const bool need_phase1 = b.minCoeff() < 0.0;
  const int art = need_phase1 ? 1 : 0;
  const int cols = n + m + art;  // structural, slack, artificial
  const int rhs = cols;

  // Tableau rows 0..m-1 are constraints, row m is the objective; the
  // objective row holds reduced costs and minus the objective value.
  Mat T = Mat::Zero(m + 1, cols + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(rhs).head(m) = b;

  std::vector<int> basis(static_cast<std::size_t>(m));
  std::iota(basis.begin(), basis.end(), n);

  int iters = 0;
  auto pivot = [&](int row, int col) {
    T.row(row) /= T(row, col);
    for (int i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(row);
    }
    basis[static_cast<std::size_t>(row)] = col;
  };

  // Runs simplex on the current objective row, considering entering columns
  // in [0, scan_cols).
  auto run = [&](int scan_cols) -> LpStatus {
    while (true) {
      if (iters >= opts.max_iterations) return LpStatus::stalled;
      const bool bland = iters >= opts.bland_after;
      int enter = -1;
      if (bland) {
        for (int j = 0; j < scan_cols; ++j)
          if (T(m, j) > opts.tol) {
            enter = j;
            break;
          }
      } else {
        double best = opts.tol;
        for (int j = 0; j < scan_cols; ++j)
          if (T(m, j) > best) {
            best = T(m, j);
            enter = j;
          }
      }
      if (enter < 0) return LpStatus::optimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = T(i, enter);
        if (a <= opts.tol) continue;
        const double ratio = T(i, rhs) / a;
        const std::size_t ui = static_cast<std::size_t>(i);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             basis[ui] < basis[static_cast<std::size_t>(leave)])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
      ++iters;
    }
  };

  if (need_phase1) {
    const int tau = n + m;
    for (int i = 0; i < m; ++i) T(i, tau) = -1.0;
    T(m, tau) = -1.0;  // maximize -tau
    int worst = 0;
    for (int i = 1; i < m; ++i)
      if (T(i, rhs) < T(worst, rhs)) worst = i;
    pivot(worst, tau);
    const LpStatus st = run(cols);
    if (st == LpStatus::stalled) {
      res.status = st;
      res.iterations = iters;
      return res;
    }
    const double tau_value = -T(m, rhs);  // phase-1 optimum of -tau, negated
    if (tau_value > 1e-8) {
      res.status = LpStatus::infeasible;
      res.iterations = iters;
      return res;
    }
    // Drive a degenerate basic artificial out if possible; a fully zero row
    // leaves it stuck harmlessly at zero (phase 2 never scans its column).
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] != tau) continue;
      for (int j = 0; j < n + m; ++j) {
        if (std::fabs(T(i, j)) > opts.tol) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2: install the real objective and price out the current basis.
  T.row(m).setZero();
  T.row(m).head(n) = c.transpose();
  for (int i = 0; i < m; ++i) {
    const int bi = basis[static_cast<std::size_t>(i)];
    const double f = T(m, bi);
    if (f != 0.0) T.row(m) -= f * T.row(i);
  }
  res.status = run(n + m);
  res.iterations = iters;
  if (res.status != LpStatus::optimal) return res;

  for (int i = 0; i < m; ++i) {
    const int bi = basis[static_cast<std::size_t>(i)];
    if (bi < n) res.x[bi] = T(i, rhs);
  }
  res.objective = -T(m, rhs);
  for (int i = 0; i < m; ++i) res.dual[i] = std::max(0.0, -T(m, n + i));

  const Vec slack = A * res.x - b;
  res.primal_residual = std::max(0.0, slack.maxCoeff());
  if (n > 0)
    res.primal_residual = std::max(res.primal_residual, -res.x.minCoeff());
  if (n > 0) {
    const Vec reduced = c - A.transpose() * res.dual;
    res.dual_residual = std::max(0.0, reduced.maxCoeff());
  }
  res.duality_gap = std::fabs(c.dot(res.x) - b.dot(res.dual));
  return res;
}

}  // namespace capdisp
