#include "driftclass/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "driftclass/error.hpp"

namespace driftclass {

std::vector<double> Grid::nodes() const {
  std::vector<double> out(points);
  for (int j = 0; j < points; ++j) out[j] = at(j);
  return out;
}

PathRefs refs(std::span<const DiffusionPath> paths) {
  PathRefs out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(&p);
  return out;
}

PathRefs refs_of_class(std::span<const DiffusionPath> paths, int label) {
  PathRefs out;
  for (const auto& p : paths)
    if (p.label == label) out.push_back(&p);
  return out;
}

double NWEstimate::operator()(double x) const {
  if (!(x >= grid.lo && x <= grid.hi)) return 0.0;
  const double pos = (x - grid.lo) / grid.step();
  const auto j = static_cast<int>(pos);
  if (j >= grid.points - 1) return b_hat.back();
  const double w = pos - j;
  return (1.0 - w) * b_hat[j] + w * b_hat[j + 1];
}

double bandwidth_rule(long n, double beta) {
  if (n < 2) fail(ErrorCode::InvalidArgument, "bandwidth rule needs N >= 2");
  if (!(beta >= 1.0)) fail(ErrorCode::InvalidArgument, "beta must be >= 1");
  return std::pow(static_cast<double>(n), -1.0 / (2.0 * beta + 1.0));
}

KernelSums kernel_sums(std::span<const DiffusionPath* const> paths,
                       const KernelSpec& k, double h, double t0,
                       const Grid& grid) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidBandwidth, "bandwidth must be > 0");
  if (paths.size() < 2)
    fail(ErrorCode::DegenerateClass,
         "need at least 2 class paths, got " + std::to_string(paths.size()));
  if (grid.points < 2) fail(ErrorCode::InvalidArgument, "grid needs >= 2 points");
  const double T = paths.front()->T;
  if (!(t0 >= 0.0 && t0 < T)) fail(ErrorCode::InvalidWindow, "t0 must lie in [0, T)");

  KernelSums out;
  out.f_hat.assign(grid.points, 0.0);
  out.bf_hat.assign(grid.points, 0.0);
  const double reach = std::max(std::abs(k.support_lo), std::abs(k.support_hi)) * h;
  const double step = grid.step();
  const double inv_h = 1.0 / h;
  const int last = grid.points - 1;
  double dt = 0.0;
  for (const DiffusionPath* p : paths) {
    dt = p->dt();
    const std::size_t start = window_start(*p, t0);
    const auto& x = p->x;
    for (std::size_t s = start; s < p->steps(); ++s) {
      const double xs = x[s];
      const double dx = x[s + 1] - xs;
      const double a = (xs - reach - grid.lo) / step;
      const double b = (xs + reach - grid.lo) / step;
      if (b < 0.0 || a > last) continue;
      const int j0 = std::max(0, static_cast<int>(std::ceil(a)));
      const int j1 = std::min(last, static_cast<int>(std::floor(b)));
      for (int j = j0; j <= j1; ++j) {
        const double w = k((xs - grid.at(j)) * inv_h) * inv_h;
        out.f_hat[j] += w;
        out.bf_hat[j] += w * dx;
      }
    }
  }
  const double norm = static_cast<double>(paths.size()) * (T - t0);
  for (int j = 0; j <= last; ++j) {
    out.f_hat[j] *= dt / norm;
    out.bf_hat[j] /= norm;
  }
  return out;
}

KernelSums kernel_sums_at(std::span<const DiffusionPath* const> paths,
                          const KernelSpec& k, double h, double t0,
                          std::span<const double> points) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidBandwidth, "bandwidth must be > 0");
  if (paths.size() < 2)
    fail(ErrorCode::DegenerateClass,
         "need at least 2 class paths, got " + std::to_string(paths.size()));
  const double T = paths.front()->T;
  if (!(t0 >= 0.0 && t0 < T)) fail(ErrorCode::InvalidWindow, "t0 must lie in [0, T)");
  KernelSums out;
  out.f_hat.assign(points.size(), 0.0);
  out.bf_hat.assign(points.size(), 0.0);
  const double inv_h = 1.0 / h;
  double dt = 0.0;
  for (const DiffusionPath* p : paths) {
    dt = p->dt();
    const std::size_t start = window_start(*p, t0);
    for (std::size_t s = start; s < p->steps(); ++s) {
      const double dx = p->x[s + 1] - p->x[s];
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double w = k((p->x[s] - points[i]) * inv_h) * inv_h;
        out.f_hat[i] += w;
        out.bf_hat[i] += w * dx;
      }
    }
  }
  const double norm = static_cast<double>(paths.size()) * (T - t0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.f_hat[i] *= dt / norm;
    out.bf_hat[i] /= norm;
  }
  return out;
}

std::vector<double> density_estimate(std::span<const DiffusionPath* const> paths,
                                     const KernelSpec& k, double h, double t0,
                                     const Grid& grid) {
  return kernel_sums(paths, k, h, t0, grid).f_hat;
}

std::vector<double> bf_estimate(std::span<const DiffusionPath* const> paths,
                                const KernelSpec& k, double h, double t0,
                                const Grid& grid) {
  return kernel_sums(paths, k, h, t0, grid).bf_hat;
}

NWEstimate nw_estimate(std::span<const double> f_hat,
                       std::span<const double> bf_hat, double m) {
  if (!(m > 0.0)) fail(ErrorCode::InvalidTruncation, "truncation level m must be > 0");
  if (f_hat.size() != bf_hat.size())
    fail(ErrorCode::InvalidArgument, "f_hat and bf_hat lengths differ");
  NWEstimate est;
  est.m = m;
  est.f_hat.assign(f_hat.begin(), f_hat.end());
  est.bf_hat.assign(bf_hat.begin(), bf_hat.end());
  est.b_hat.resize(f_hat.size());
  for (std::size_t j = 0; j < f_hat.size(); ++j)
    est.b_hat[j] = f_hat[j] >= m ? bf_hat[j] / f_hat[j] : 0.0;
  return est;
}

NWEstimate fit_drift(std::span<const DiffusionPath> paths, int label,
                     const FitConfig& cfg) {
  if (paths.empty()) fail(ErrorCode::EmptySample, "no paths to fit");
  const PathRefs cls = refs_of_class(paths, label);
  if (cls.size() < 2)
    fail(ErrorCode::DegenerateClass, "class " + std::to_string(label) + " has " +
                                         std::to_string(cls.size()) + " path(s)");
  const auto n = static_cast<long>(paths.size());
  const double h = cfg.bandwidth ? *cfg.bandwidth : bandwidth_rule(n, cfg.beta);
  KernelSums sums = kernel_sums(cls, cfg.kernel, h, cfg.t0, cfg.grid);
  NWEstimate est = nw_estimate(sums.f_hat, sums.bf_hat, cfg.m);
  est.grid = cfg.grid;
  est.h = h;
  est.n_class = static_cast<long>(cls.size());
  est.n_total = n;
  est.t0 = cfg.t0;
  return est;
}

double grid_sup_error(const NWEstimate& est, const DriftFunction& truth) {
  double best = 0.0;
  for (int j = 0; j < est.grid.points; ++j)
    best = std::max(best, std::abs(est.b_hat[j] - truth(est.grid.at(j))));
  return best;
}

void write_estimate_csv(std::ostream& out, const NWEstimate& est) {
  out << "x,f_hat,bf_hat,b_hat,truncated\n";
  char buf[160];
  for (int j = 0; j < est.grid.points; ++j) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%d\n", est.grid.at(j),
                  est.f_hat[j], est.bf_hat[j], est.b_hat[j], est.truncated(j) ? 1 : 0);
    out << buf;
  }
}

}  // namespace driftclass
