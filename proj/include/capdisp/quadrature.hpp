#pragma once

#include <functional>
#include <vector>

namespace capdisp {

// Adaptive Simpson on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

// Nodes/weights of k-point Gauss-Legendre on [-1, 1] (cached per order).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int k);

// Composite k-point Gauss-Legendre with `panels` equal panels on [a, b].
double composite_gauss(const std::function<double(double)>& f, double a, double b, int k, int panels);

}  // namespace capdisp
