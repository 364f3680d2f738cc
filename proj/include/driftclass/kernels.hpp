#pragma once

#include <vector>

namespace driftclass {

enum class KernelKind { Legendre, Bump };

/// A compactly supported smoothing kernel with the norms the exponential
/// inequality needs.  Immutable after construction.
///
/// Legendre kind: K(x) = sum_{m<=order} phi_m(0) phi_m(x) on [-1, 1], stored
/// as monomial coefficients (coefficients[j] multiplies x^j).
/// Bump kind: K(x) = a * exp(-1 / (1 - 4x^2)) on (-1/2, 1/2); coefficients
/// holds the single amplitude a.
struct KernelSpec {
  KernelKind kind = KernelKind::Legendre;
  int order = 0;
  std::vector<double> coefficients;
  double support_lo = -1.0;
  double support_hi = 1.0;
  double l2_norm = 0.0;    // ||K||, so ||K||^2 = l2_norm^2
  double sup_norm = 0.0;   // ||K||_inf
  double lipschitz = 0.0;  // C_K, max |K'| on the support

  double operator()(double x) const;
};

KernelSpec build_legendre_kernel(int order);
KernelSpec build_bump_kernel(double amplitude = 1.0);

double eval_kernel(const KernelSpec& k, double x);

/// K_h(x) = K(x / h) / h.
double eval_scaled(const KernelSpec& k, double h, double x);

/// Integral of x^power K(x) over the support (adaptive quadrature, 1e-10).
double kernel_moment(const KernelSpec& k, int power);

/// Integral of |x^power K(x)| over the support.
double kernel_abs_moment(const KernelSpec& k, int power);

/// Normalized Legendre polynomial phi_m as monomial coefficients.
std::vector<double> normalized_legendre(int degree);

}  // namespace driftclass
