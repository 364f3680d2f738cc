#include "driftclass/kernels.hpp"

#include <cmath>
#include <string>

#include "driftclass/error.hpp"
#include "driftclass/quadrature.hpp"

namespace driftclass {

namespace {

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t j = 1; j < c.size(); ++j) d.push_back(j * c[j]);
  return d;
}

double bump_value(double a, double x) {
  const double s = 1.0 - 4.0 * x * x;
  return s > 0.0 ? a * std::exp(-1.0 / s) : 0.0;
}

double bump_slope(double a, double x) {
  const double s = 1.0 - 4.0 * x * x;
  return s > 0.0 ? bump_value(a, x) * (-8.0 * x) / (s * s) : 0.0;
}

// Max of fn over [lo, hi]: dense grid, then golden-section refinement of
// every grid-local maximum.
template <class Fn>
double dense_max(Fn fn, double lo, double hi, int points = 10001) {
  std::vector<double> v(points);
  const double step = (hi - lo) / (points - 1);
  for (int j = 0; j < points; ++j) v[j] = fn(lo + j * step);
  double best = 0.0;
  for (int j = 0; j < points; ++j) best = std::max(best, v[j]);
  for (int j = 1; j + 1 < points; ++j) {
    if (v[j] < v[j - 1] || v[j] < v[j + 1]) continue;
    double a = lo + (j - 1) * step;
    double b = lo + (j + 1) * step;
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = fn(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = fn(d);
      }
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

void fill_norms(KernelSpec& k) {
  const double l2sq = quad::adaptive(
      [&k](double x) { const double v = k(x); return v * v; }, k.support_lo,
      k.support_hi, 1e-13);
  k.l2_norm = std::sqrt(l2sq);
  k.sup_norm = dense_max([&k](double x) { return std::abs(k(x)); },
                         k.support_lo, k.support_hi);
  if (k.kind == KernelKind::Legendre) {
    const auto d = derivative(k.coefficients);
    k.lipschitz = dense_max([&d](double x) { return std::abs(horner(d, x)); },
                            k.support_lo, k.support_hi);
  } else {
    const double a = k.coefficients.front();
    k.lipschitz = dense_max([a](double x) { return std::abs(bump_slope(a, x)); },
                            k.support_lo, k.support_hi);
  }
}

}  // namespace

std::vector<double> normalized_legendre(int degree) {
  // (m+1) P_{m+1} = (2m+1) x P_m - m P_{m-1}
  std::vector<double> prev{1.0};
  std::vector<double> cur{0.0, 1.0};
  if (degree == 0) cur = prev;
  for (int m = 1; m < degree; ++m) {
    std::vector<double> next(m + 2, 0.0);
    for (int j = 0; j <= m; ++j) next[j + 1] += (2.0 * m + 1.0) * cur[j];
    for (int j = 0; j < m; ++j) next[j] -= m * prev[j];
    for (auto& c : next) c /= (m + 1.0);
    prev = std::move(cur);
    cur = std::move(next);
  }
  const double scale = std::sqrt((2.0 * degree + 1.0) / 2.0);
  for (auto& c : cur) c *= scale;
  return cur;
}

double KernelSpec::operator()(double x) const {
  if (kind == KernelKind::Bump) return bump_value(coefficients.front(), x);
  if (x < support_lo || x > support_hi) return 0.0;
  return horner(coefficients, x);
}

KernelSpec build_legendre_kernel(int order) {
  if (order < 1) fail(ErrorCode::InvalidOrder, "kernel order must be >= 1, got " + std::to_string(order));
  KernelSpec k;
  k.kind = KernelKind::Legendre;
  k.order = order;
  k.coefficients.assign(order + 1, 0.0);
  for (int m = 0; m <= order; ++m) {
    const auto phi = normalized_legendre(m);
    const double at_zero = phi.front();
    if (at_zero == 0.0) continue;  // odd degrees vanish at the origin
    for (std::size_t j = 0; j < phi.size(); ++j)
      k.coefficients[j] += at_zero * phi[j];
  }
  k.support_lo = -1.0;
  k.support_hi = 1.0;
  fill_norms(k);
  return k;
}

KernelSpec build_bump_kernel(double amplitude) {
  if (!(amplitude > 0.0))
    fail(ErrorCode::InvalidAmplitude, "bump amplitude must be > 0");
  KernelSpec k;
  k.kind = KernelKind::Bump;
  k.order = 0;
  k.coefficients = {amplitude};
  k.support_lo = -0.5;
  k.support_hi = 0.5;
  fill_norms(k);
  return k;
}

double eval_kernel(const KernelSpec& k, double x) { return k(x); }

double eval_scaled(const KernelSpec& k, double h, double x) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidBandwidth, "bandwidth must be > 0");
  return k(x / h) / h;
}

double kernel_moment(const KernelSpec& k, int power) {
  if (power < 0) fail(ErrorCode::InvalidArgument, "moment power must be >= 0");
  return quad::adaptive(
      [&k, power](double x) { return std::pow(x, power) * k(x); },
      k.support_lo, k.support_hi, 1e-10);
}

double kernel_abs_moment(const KernelSpec& k, int power) {
  if (power < 0) fail(ErrorCode::InvalidArgument, "moment power must be >= 0");
  return quad::adaptive(
      [&k, power](double x) { return std::abs(std::pow(x, power) * k(x)); },
      k.support_lo, k.support_hi, 1e-10);
}

}  // namespace driftclass
