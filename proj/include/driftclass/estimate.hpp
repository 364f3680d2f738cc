#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "driftclass/drifts.hpp"
#include "driftclass/kernels.hpp"
#include "driftclass/simulate.hpp"

namespace driftclass {

/// Uniform evaluation grid of `points` nodes on [lo, hi].
struct Grid {
  double lo = -1.0;
  double hi = 1.0;
  int points = 201;

  double step() const { return (hi - lo) / (points - 1); }
  double at(int j) const { return j == points - 1 ? hi : lo + j * step(); }
  std::vector<double> nodes() const;
};

using PathRefs = std::vector<const DiffusionPath*>;

PathRefs refs(std::span<const DiffusionPath> paths);
PathRefs refs_of_class(std::span<const DiffusionPath> paths, int label);

/// Grid-evaluated truncated Nadaraya-Watson drift estimate.
struct NWEstimate {
  Grid grid;
  std::vector<double> f_hat;
  std::vector<double> bf_hat;
  std::vector<double> b_hat;
  double h = 0.0;
  double m = 0.0;
  long n_class = 0;
  long n_total = 0;
  double t0 = 0.0;

  bool truncated(int j) const { return f_hat[j] < m; }
  /// Linear interpolation of b_hat; 0 outside the grid hull.
  double operator()(double x) const;
};

/// h_N = N^(-1 / (2 beta + 1)); N >= 2.
double bandwidth_rule(long n, double beta);

/// f_hat(x) = 1/(N_i (T - t0)) sum_j int_{t0}^T K_h(X^j_t - x) dt.
std::vector<double> density_estimate(std::span<const DiffusionPath* const> paths,
                                     const KernelSpec& k, double h, double t0,
                                     const Grid& grid);

/// bf_hat(x) = 1/(N_i (T - t0)) sum_j int_{t0}^T K_h(X^j_t - x) dX^j_t.
std::vector<double> bf_estimate(std::span<const DiffusionPath* const> paths,
                                const KernelSpec& k, double h, double t0,
                                const Grid& grid);

struct KernelSums {
  std::vector<double> f_hat;
  std::vector<double> bf_hat;
};

/// Both estimators in one pass over the paths.
KernelSums kernel_sums(std::span<const DiffusionPath* const> paths,
                       const KernelSpec& k, double h, double t0,
                       const Grid& grid);

/// Same sums at arbitrary points (no grid indexing).
KernelSums kernel_sums_at(std::span<const DiffusionPath* const> paths,
                          const KernelSpec& k, double h, double t0,
                          std::span<const double> points);

/// b_hat = bf_hat / f_hat where f_hat >= m, else 0.
NWEstimate nw_estimate(std::span<const double> f_hat,
                       std::span<const double> bf_hat, double m);

struct FitConfig {
  KernelSpec kernel;
  double beta = 1.0;
  double m = 0.05;
  double t0 = 0.1;
  Grid grid;
  std::optional<double> bandwidth;  // overrides bandwidth_rule(N, beta)
};

/// Splits the sample by label and fits class `label` with h from the full
/// sample size N.  Throws DegenerateClass when fewer than 2 class paths.
NWEstimate fit_drift(std::span<const DiffusionPath> paths, int label,
                     const FitConfig& cfg);

/// max_j |b_hat(x_j) - b(x_j)| over the fit grid.
double grid_sup_error(const NWEstimate& est, const DriftFunction& truth);

/// CSV dump with header `x,f_hat,bf_hat,b_hat,truncated`.
void write_estimate_csv(std::ostream& out, const NWEstimate& est);

}  // namespace driftclass
