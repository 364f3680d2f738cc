#include "driftclass/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace driftclass::quad {

Rule gauss_legendre(std::size_t n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

namespace {

const Rule& rule64() {
  static const Rule r = gauss_legendre(64);
  return r;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const Rule& r = rule64();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc += r.weights[i] * f(mid + half * r.nodes[i]);
  return acc * half;
}

double refine(const std::function<double(double)>& f, double a, double b,
              double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid);
  const double right = panel(f, mid, b);
  if (depth >= 40 || std::abs(left + right - whole) <= tol) return left + right;
  return refine(f, a, mid, left, 0.5 * tol, depth + 1) +
         refine(f, mid, b, right, 0.5 * tol, depth + 1);
}

int panel_count(double lo, double hi) {
  return std::max(1, static_cast<int>(std::ceil(hi - lo)));
}

}  // namespace

double composite(const std::function<double(double)>& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const int panels = panel_count(lo, hi);
  const double w = (hi - lo) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) acc += panel(f, lo + p * w, lo + (p + 1) * w);
  return acc;
}

double adaptive(const std::function<double(double)>& f, double lo, double hi,
                double abs_tol) {
  if (!(hi > lo)) return 0.0;
  const int panels = panel_count(lo, hi);
  const double w = (hi - lo) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * w;
    const double b = a + w;
    acc += refine(f, a, b, panel(f, a, b), abs_tol / panels, 0);
  }
  return acc;
}

double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * step;
}

}  // namespace driftclass::quad
