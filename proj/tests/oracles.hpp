#pragma once

// Reference computations for the tests.  Each is written independently of
// the library code it checks (different algorithm or brute force).

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

// Composite Simpson rule with n (rounded up to even) panels.
template <class F>
double simpson(F&& f, double lo, double hi, int n) {
  if (n % 2) ++n;
  const double h = (hi - lo) / n;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return acc * h / 3.0;
}

inline double polyval(const std::vector<double>& c, double x) {
  double acc = 0.0;
  double p = 1.0;
  for (double v : c) {
    acc += v * p;
    p *= x;
  }
  return acc;
}

inline double gaussian_pdf(double z, double var) {
  return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double se(std::span<const double> v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

// Plain left-point sums of sum b(x_k) dX_k - 0.5 sum b(x_k)^2 dt.
template <class B>
double girsanov_direct(std::span<const double> x, double dt, B&& b) {
  double ito = 0.0;
  double quad = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double v = b(x[k]);
    ito += v * (x[k + 1] - x[k]);
    quad += v * v * dt;
  }
  return ito - 0.5 * quad;
}

}  // namespace oracle
