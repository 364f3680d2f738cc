#include "driftclass/drifts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "driftclass/error.hpp"

namespace driftclass {

namespace {

constexpr double kTaperWidth = 0.05;

double bump_profile(double u) {
  const double s = 1.0 - u * u;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// C-infinity step from 1 at d = 0 down to 0 at d = width.
double taper(double d, double width) {
  if (d <= 0.0) return 1.0;
  if (d >= width) return 0.0;
  const double s = d / width;
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  return a / (a + b);
}

}  // namespace

double HypercubeSpec::base_level() const {
  return kappa * std::pow(static_cast<double>(cells), -beta);
}

int hypercube_cells(long n, double beta) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sample size must be >= 1");
  const double d = std::pow(static_cast<double>(n), 1.0 / (2.0 * beta + 1.0));
  // floor with a guard against pow landing one ulp under an exact integer
  auto cells = static_cast<int>(std::floor(d + 1e-12));
  return std::max(cells, 1);
}

double DriftFunction::operator()(double x) const {
  switch (kind_) {
    case DriftKind::Zero:
      return 0.0;
    case DriftKind::Bump: {
      if (x <= support_.lo || x >= support_.hi) return 0.0;
      const double u = (2.0 * x - support_.lo - support_.hi) / support_.length();
      return amplitude_ * bump_profile(u);
    }
    case DriftKind::Hypercube: {
      const double base = cube_.base_level();
      if (x < 0.0 || x > 1.0) {
        if (!cube_.extend) {
          std::ostringstream msg;
          msg << "hypercube drift evaluated at " << x << " outside [0, 1]";
          fail(ErrorCode::Domain, msg.str());
        }
        const double d = x < 0.0 ? -x : x - 1.0;
        return base * taper(d, kTaperWidth);
      }
      const int D = cube_.cells;
      int k = static_cast<int>(std::floor(x * D)) + 1;  // active cell, 1-based
      k = std::clamp(k, 1, D);
      const double theta = cube_.theta[k - 1];
      if (theta == 0.0) return base;
      // phi_k(x) = R D^-beta K((x - x_k) D), K(u) = a exp(-1/(1 - 4u^2))
      const double u = 2.0 * (x - cube_.center(k)) * D;
      const double amp = cube_.holder_const * std::pow(static_cast<double>(D), -cube_.beta);
      return base + theta * amp * bump_amplitude_ * bump_profile(u);
    }
    case DriftKind::Custom:
      return custom_(x);
  }
  return 0.0;
}

void DriftFunction::measure() {
  constexpr int points = 20001;
  const double lo = support_.lo;
  const double step = support_.length() / (points - 1);
  double sup = 0.0;
  double lip = 0.0;
  double prev = (*this)(lo);
  sup = std::abs(prev);
  for (int j = 1; j < points; ++j) {
    const double x = j == points - 1 ? support_.hi : lo + j * step;
    const double v = (*this)(x);
    sup = std::max(sup, std::abs(v));
    lip = std::max(lip, std::abs(v - prev) / step);
    prev = v;
  }
  sup_norm_ = sup;
  measured_lipschitz_ = lip;
}

DriftFunction make_zero_drift(Interval nominal_support) {
  if (!(nominal_support.lo < nominal_support.hi))
    fail(ErrorCode::InvalidSupport, "support must satisfy lo < hi");
  DriftFunction d;
  d.kind_ = DriftKind::Zero;
  d.support_ = nominal_support;
  d.description_ = "zero";
  d.sup_norm_ = 0.0;
  d.measured_lipschitz_ = 0.0;
  return d;
}

DriftFunction make_bump_drift(Interval support, double amplitude, double beta,
                              double holder_const) {
  if (!(support.lo < support.hi))
    fail(ErrorCode::InvalidSupport, "support must satisfy A < B");
  if (amplitude == 0.0 || !std::isfinite(amplitude))
    fail(ErrorCode::InvalidAmplitude, "bump drift amplitude must be finite and non-zero");
  if (!(beta >= 1.0)) fail(ErrorCode::InvalidArgument, "beta must be >= 1");
  if (!(holder_const > 0.0)) fail(ErrorCode::InvalidArgument, "Holder constant must be > 0");
  DriftFunction d;
  d.kind_ = DriftKind::Bump;
  d.support_ = support;
  d.amplitude_ = amplitude;
  d.beta_ = beta;
  d.holder_const_ = holder_const;
  std::ostringstream desc;
  desc << "bump[" << support.lo << "," << support.hi << "]x" << amplitude;
  d.description_ = desc.str();
  d.measure();
  d.sup_norm_ = std::abs(amplitude) * std::exp(-1.0);
  return d;
}

DriftFunction make_hypercube_drift(const HypercubeSpec& spec,
                                   const KernelSpec& bump) {
  if (bump.kind != KernelKind::Bump)
    fail(ErrorCode::WrongKernelKind, "hypercube cells need the bump kernel");
  if (spec.cells < 1) fail(ErrorCode::InvalidArgument, "D must be >= 1");
  if (static_cast<int>(spec.theta.size()) != spec.cells)
    fail(ErrorCode::InvalidArgument, "theta must have D entries");
  for (double t : spec.theta)
    if (!(t >= 0.0 && t <= 1.0))
      fail(ErrorCode::InvalidArgument, "theta entries must lie in [0, 1]");
  if (spec.kappa == 0.0) fail(ErrorCode::InvalidArgument, "kappa must be non-zero");
  if (!(spec.holder_const > 0.0)) fail(ErrorCode::InvalidArgument, "R must be > 0");
  if (!(spec.beta >= 1.0)) fail(ErrorCode::InvalidArgument, "beta must be >= 1");
  DriftFunction d;
  d.kind_ = DriftKind::Hypercube;
  d.cube_ = spec;
  d.bump_amplitude_ = bump.coefficients.front();
  d.support_ = {0.0, 1.0};
  d.beta_ = spec.beta;
  d.holder_const_ = spec.holder_const;
  std::ostringstream desc;
  desc << "hypercube D=" << spec.cells << " theta=";
  for (double t : spec.theta) desc << (t == 0.0 ? '0' : t == 1.0 ? '1' : '*');
  d.description_ = desc.str();
  d.measure();
  return d;
}

DriftFunction make_custom_drift(std::function<double(double)> fn,
                                Interval support, std::string description) {
  if (!(support.lo < support.hi))
    fail(ErrorCode::InvalidSupport, "support must satisfy lo < hi");
  DriftFunction d;
  d.kind_ = DriftKind::Custom;
  d.custom_ = std::move(fn);
  d.support_ = support;
  d.description_ = std::move(description);
  d.measure();
  return d;
}

double drift_sup_distance(const DriftFunction& b1, const DriftFunction& b2,
                          int grid_points) {
  if (grid_points < 2) fail(ErrorCode::InvalidArgument, "grid_points must be >= 2");
  const double lo = std::min(b1.support().lo, b2.support().lo);
  const double hi = std::max(b1.support().hi, b2.support().hi);
  const double step = (hi - lo) / (grid_points - 1);
  double best = 0.0;
  for (int j = 0; j < grid_points; ++j) {
    const double x = j == grid_points - 1 ? hi : lo + j * step;
    best = std::max(best, std::abs(b1(x) - b2(x)));
  }
  return best;
}

}  // namespace driftclass
