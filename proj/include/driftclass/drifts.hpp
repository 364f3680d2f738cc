#pragma once

#include <functional>
#include <string>
#include <vector>

#include "driftclass/kernels.hpp"

namespace driftclass {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Assouad-type hypercube parameters: f = kappa D^-beta + sum theta_k phi_k
/// on [0, 1], with phi_k = R D^-beta K((x - x_k) D) and x_k = (k - 1/2) / D.
struct HypercubeSpec {
  int cells = 1;  // D
  std::vector<double> theta;
  double kappa = 1.0;
  double holder_const = 1.0;  // R
  double beta = 1.0;
  bool extend = true;

  double center(int k) const { return (k - 0.5) / cells; }  // k is 1-based
  double base_level() const;                                // kappa D^-beta
};

/// D = floor(N^(1 / (2 beta + 1))).
int hypercube_cells(long n, double beta);

enum class DriftKind { Zero, Bump, Hypercube, Custom };

/// An evaluable drift with its support and smoothness metadata.  Pure and
/// immutable; copies share nothing mutable.
class DriftFunction {
 public:
  double operator()(double x) const;

  DriftKind kind() const { return kind_; }
  const Interval& support() const { return support_; }
  double beta() const { return beta_; }
  double holder_const() const { return holder_const_; }
  double sup_norm() const { return sup_norm_; }
  /// Measured max |b'| over a dense grid of the support.
  double measured_lipschitz() const { return measured_lipschitz_; }
  const std::string& description() const { return description_; }
  const HypercubeSpec* hypercube() const {
    return kind_ == DriftKind::Hypercube ? &cube_ : nullptr;
  }

  friend DriftFunction make_zero_drift(Interval nominal_support);
  friend DriftFunction make_bump_drift(Interval support, double amplitude,
                                       double beta, double holder_const);
  friend DriftFunction make_hypercube_drift(const HypercubeSpec& spec,
                                            const KernelSpec& bump);
  friend DriftFunction make_custom_drift(std::function<double(double)> fn,
                                         Interval support,
                                         std::string description);

 private:
  void measure();

  DriftKind kind_ = DriftKind::Zero;
  Interval support_{-1.0, 1.0};
  double beta_ = 1.0;
  double holder_const_ = 1.0;
  double sup_norm_ = 0.0;
  double measured_lipschitz_ = 0.0;
  std::string description_ = "zero";

  double amplitude_ = 0.0;  // bump
  HypercubeSpec cube_;
  double bump_amplitude_ = 1.0;  // kernel amplitude a for the hypercube cells
  std::function<double(double)> custom_;
};

/// b == 0.  The support is nominal: it only fixes where estimators of this
/// drift are evaluated.
DriftFunction make_zero_drift(Interval nominal_support = {-1.0, 1.0});

/// b(x) = amplitude * exp(-1 / (1 - u^2)), u = (2x - A - B) / (B - A), zero
/// outside (A, B).
DriftFunction make_bump_drift(Interval support, double amplitude,
                              double beta = 1.0, double holder_const = 1.0);

DriftFunction make_hypercube_drift(const HypercubeSpec& spec,
                                   const KernelSpec& bump);

/// Arbitrary callable; used by tests (constant drifts on the whole line).
DriftFunction make_custom_drift(std::function<double(double)> fn,
                                Interval support, std::string description);

/// Max of |b1 - b2| over a uniform grid on the hull of both supports.
double drift_sup_distance(const DriftFunction& b1, const DriftFunction& b2,
                          int grid_points);

}  // namespace driftclass
