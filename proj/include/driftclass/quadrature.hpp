#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace driftclass::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes (Newton iteration on P_n).
Rule gauss_legendre(std::size_t n);

/// Fixed composite rule: panels of length at most 1, 64 nodes per panel.
double composite(const std::function<double(double)>& f, double lo, double hi);

/// Adaptive bisection on top of the 64-node rule until two levels agree to
/// `abs_tol`.
double adaptive(const std::function<double(double)>& f, double lo, double hi,
                double abs_tol = 1e-10);

/// Trapezoid rule on tabulated values over a uniform grid.
double trapezoid(std::span<const double> values, double step);

}  // namespace driftclass::quad
