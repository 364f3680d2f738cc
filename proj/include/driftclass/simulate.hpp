#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "driftclass/drifts.hpp"
#include "driftclass/rng.hpp"

namespace driftclass {

inline constexpr int kUnlabeled = -1;

/// A discretized trajectory on the uniform grid t_k = k T / n.
struct DiffusionPath {
  double T = 1.0;
  double x0 = 0.0;
  int label = kUnlabeled;
  std::vector<double> x;   // n + 1 states, x[0] == x0
  std::vector<double> dW;  // n Brownian increments

  std::size_t steps() const { return dW.size(); }
  double dt() const { return T / static_cast<double>(steps()); }
  double time(std::size_t k) const { return static_cast<double>(k) * dt(); }
};

/// dX = b_Y(X) dt + dW, X_0 = x0, Y ~ Bernoulli(p1).
struct MixtureModel {
  DriftFunction b0;
  DriftFunction b1;
  double p1 = 0.5;
  double x0 = 0.0;
  double T = 1.0;

  double p0() const { return 1.0 - p1; }
  const DriftFunction& drift(int label) const { return label == 1 ? b1 : b0; }
  /// Throws unless p1 is in (0, 1), T > 0 and the drifts differ on a grid.
  void validate() const;
};

struct MCEstimate {
  double value = 0.0;
  double se = 0.0;
  long n = 0;
};

int sample_label(double p1, Rng& rng);

struct SimulationOptions {
  bool inject_noise = true;
};

/// Euler-Maruyama: x[k+1] = x[k] + b(x[k]) dt + dW[k].
DiffusionPath simulate_path(const MixtureModel& model, int label, int n_steps,
                            Rng& rng, SimulationOptions opts = {});

/// Draws the label, then the path, from one stream.
DiffusionPath simulate_labeled_path(const MixtureModel& model, int n_steps,
                                    Rng& rng);

/// `count` labeled paths; path j uses the stream seed.child(j).
std::vector<DiffusionPath> simulate_sample(const MixtureModel& model,
                                           std::size_t count, int n_steps,
                                           const SeedSequence& seed,
                                           int threads = 1);

/// Index of the grid point nearest to `from_t`; throws InvalidWindow when
/// from_t >= T or from_t < 0.
std::size_t window_start(const DiffusionPath& path, double from_t);

/// Left-endpoint Ito sum  sum_k g(x[k]) (x[k+1] - x[k]).
///
/// Evaluated in summation-by-parts form
///   g(x[n-1]) x[n] - g(x[0]) x[0] - sum_{k=1}^{n-1} x[k] (g(x[k]) - g(x[k-1]))
/// which is the same sum but telescopes bit-exactly when g is constant.
template <class G>
double ito_integral(const DiffusionPath& path, G&& g, std::size_t from = 0) {
  const std::size_t n = path.steps();
  if (from >= n) return 0.0;
  const auto& x = path.x;
  double prev = g(x[from]);
  double inner = 0.0;
  for (std::size_t k = from + 1; k < n; ++k) {
    const double cur = g(x[k]);
    inner += x[k] * (cur - prev);
    prev = cur;
  }
  return (prev * x[n] - g(x[from]) * x[from]) - inner;
}

/// Left-endpoint Riemann sum of g(x[k]) dt over grid times t_k >= from_t
/// (from_t snapped to the nearest grid point).
template <class G>
double time_integral(const DiffusionPath& path, G&& g, double from_t = 0.0) {
  const std::size_t start = window_start(path, from_t);
  double acc = 0.0;
  for (std::size_t k = start; k < path.steps(); ++k) acc += g(path.x[k]);
  return acc * path.dt();
}

/// Monte Carlo transition density of the class-1 diffusion via the
/// Brownian-bridge representation
///   Gamma(s,t,x,y) = Lambda / sqrt(2 pi (t-s)) exp(-(y-x)^2 / (2(t-s))
///                    + int_x^y f),
///   Lambda = E exp((t-s) int_0^1 G((1-u)x + uy + sqrt(t-s) B_u) du),
///   G = -(f^2 + f') / 2.
MCEstimate transition_density_mc(const DriftFunction& drift, double s, double t,
                                 double x, double y, int n_bridge, Rng& rng,
                                 int bridge_points = 200);

struct OccupationOptions {
  int n_steps = 500;
  int threads = 1;
};

/// Histogram estimate of the time-averaged density
///   f_i(x) = (1/(T - t0)) int_{t0}^T Gamma_i(0, t, x0, x) dt,
/// one value per requested point.  Path j uses seed.child(j).
std::vector<MCEstimate> occupation_density_mc(
    const MixtureModel& model, int label, std::span<const double> points,
    double t0, int n_paths, double bin_width, const SeedSequence& seed,
    OccupationOptions opts = {});

MCEstimate occupation_density_mc(const MixtureModel& model, int label,
                                 double x, double t0, int n_paths,
                                 double bin_width, const SeedSequence& seed,
                                 OccupationOptions opts = {});

/// CSV dump with header `path_id,label,t,x`.
void write_paths_csv(std::ostream& out, std::span<const DiffusionPath> paths);

}  // namespace driftclass
