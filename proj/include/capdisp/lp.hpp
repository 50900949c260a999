#pragma once

#include <string>

#include "capdisp/sphere.hpp"

namespace capdisp {

enum class LpStatus { optimal, infeasible, unbounded, stalled };

std::string to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::stalled;
  double objective = 0.0;
  Vec x;     // primal values (size = columns of A), valid when optimal
  Vec dual;  // row multipliers, valid when optimal
  int iterations = 0;
  // Residuals of the returned pair (x, dual), so callers can decide how much
  // to trust a certificate independently of the status flag.
  double primal_residual = 0.0;  // max violation of Ax <= b, x >= 0
  double dual_residual = 0.0;    // max violation of A^T y >= c, y >= 0
  double duality_gap = 0.0;      // |c.x - b.y|
};

struct LpOptions {
  int max_iterations = 50000;
  int bland_after = 10000;  // switch to Bland's rule to break cycling
  double tol = 1e-9;
};

// Maximize c.x subject to Ax <= b and x >= 0 by a dense tableau simplex.
// Negative entries of b are handled by a single artificial variable driven
// out in a first phase. Variable upper bounds belong in A as ordinary rows.
LpResult solve_lp_max(const Mat& A, const Vec& b, const Vec& c,
                      const LpOptions& opts = {});

}  // namespace capdisp
