#include "driftclass/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "driftclass/error.hpp"
#include "driftclass/parallel.hpp"
#include "driftclass/quadrature.hpp"

namespace driftclass {

void MixtureModel::validate() const {
  if (!(p1 > 0.0 && p1 < 1.0))
    fail(ErrorCode::InvalidProbability, "p1 must lie in (0, 1)");
  if (!(T > 0.0)) fail(ErrorCode::InvalidArgument, "T must be > 0");
  if (drift_sup_distance(b0, b1, 2001) == 0.0)
    fail(ErrorCode::DegenerateModel, "b0 and b1 coincide on the grid");
}

int sample_label(double p1, Rng& rng) {
  if (!(p1 > 0.0 && p1 < 1.0))
    fail(ErrorCode::InvalidProbability, "p1 must lie in (0, 1)");
  return rng.bernoulli(p1) ? 1 : 0;
}

DiffusionPath simulate_path(const MixtureModel& model, int label, int n_steps,
                            Rng& rng, SimulationOptions opts) {
  if (n_steps < 1) fail(ErrorCode::InvalidArgument, "n_steps must be >= 1");
  if (label != 0 && label != 1) fail(ErrorCode::InvalidArgument, "label must be 0 or 1");
  DiffusionPath p;
  p.T = model.T;
  p.x0 = model.x0;
  p.label = label;
  p.x.resize(n_steps + 1);
  p.dW.resize(n_steps);
  const double dt = model.T / n_steps;
  const double sd = std::sqrt(dt);
  const DriftFunction& b = model.drift(label);
  double x = model.x0;
  p.x[0] = x;
  for (int k = 0; k < n_steps; ++k) {
    const double dw = opts.inject_noise ? sd * rng.normal() : 0.0;
    p.dW[k] = dw;
    x = x + b(x) * dt + dw;
    p.x[k + 1] = x;
  }
  return p;
}

DiffusionPath simulate_labeled_path(const MixtureModel& model, int n_steps,
                                    Rng& rng) {
  const int label = sample_label(model.p1, rng);
  return simulate_path(model, label, n_steps, rng);
}

std::vector<DiffusionPath> simulate_sample(const MixtureModel& model,
                                           std::size_t count, int n_steps,
                                           const SeedSequence& seed,
                                           int threads) {
  std::vector<DiffusionPath> out(count);
  parallel_for(count, threads, [&](std::size_t j) {
    Rng rng(seed.child(j));
    out[j] = simulate_labeled_path(model, n_steps, rng);
  });
  return out;
}

std::size_t window_start(const DiffusionPath& path, double from_t) {
  if (!(from_t >= 0.0) || !(from_t < path.T))
    fail(ErrorCode::InvalidWindow, "window start must lie in [0, T)");
  const auto k = static_cast<std::size_t>(std::llround(from_t / path.dt()));
  return std::min(k, path.steps() - 1);
}

MCEstimate transition_density_mc(const DriftFunction& drift, double s, double t,
                                 double x, double y, int n_bridge, Rng& rng,
                                 int bridge_points) {
  if (!(s < t)) fail(ErrorCode::InvalidWindow, "transition density needs s < t");
  if (n_bridge < 2) fail(ErrorCode::InvalidArgument, "n_bridge must be >= 2");
  if (bridge_points < 2) fail(ErrorCode::InvalidArgument, "bridge grid needs >= 2 points");
  const double tau = t - s;
  constexpr double fd_step = 1e-5;
  auto G = [&drift](double z) {
    const double f = drift(z);
    const double fp = (drift(z + fd_step) - drift(z - fd_step)) / (2.0 * fd_step);
    return -0.5 * (f * f + fp);
  };

  const int intervals = bridge_points - 1;
  const double du = 1.0 / intervals;
  const double sd = std::sqrt(du);
  const double scale = std::sqrt(tau);
  std::vector<double> walk(bridge_points);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < n_bridge; ++r) {
    // Brownian bridge on [0, 1]: B_u = W_u - u W_1.
    walk[0] = 0.0;
    for (int j = 1; j <= intervals; ++j) walk[j] = walk[j - 1] + sd * rng.normal();
    const double w1 = walk[intervals];
    double integral = 0.0;
    for (int j = 0; j <= intervals; ++j) {
      const double u = j * du;
      const double bridge = walk[j] - u * w1;
      const double g = G((1.0 - u) * x + u * y + scale * bridge);
      integral += (j == 0 || j == intervals) ? 0.5 * g : g;
    }
    integral *= du;
    const double v = std::exp(tau * integral);
    sum += v;
    sum_sq += v * v;
  }
  const double lambda = sum / n_bridge;
  const double var = std::max(0.0, (sum_sq - n_bridge * lambda * lambda) / (n_bridge - 1));
  auto f = [&drift](double u) { return drift(u); };
  const double drift_term = y >= x ? quad::adaptive(f, x, y, 1e-12)
                                   : -quad::adaptive(f, y, x, 1e-12);
  const double prefactor = std::exp(-(y - x) * (y - x) / (2.0 * tau) + drift_term) /
                           std::sqrt(2.0 * std::numbers::pi * tau);
  return {prefactor * lambda, prefactor * std::sqrt(var / n_bridge), n_bridge};
}

std::vector<MCEstimate> occupation_density_mc(
    const MixtureModel& model, int label, std::span<const double> points,
    double t0, int n_paths, double bin_width, const SeedSequence& seed,
    OccupationOptions opts) {
  if (!(t0 > 0.0 && t0 < model.T))
    fail(ErrorCode::InvalidWindow, "t0 must lie in (0, T)");
  if (n_paths < 2) fail(ErrorCode::InvalidArgument, "n_paths must be >= 2");
  if (!(bin_width > 0.0)) fail(ErrorCode::InvalidArgument, "bin width must be > 0");
  const std::size_t npts = points.size();
  std::vector<std::size_t> order(npts);
  for (std::size_t i = 0; i < npts; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&points](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<double> sorted(npts);
  for (std::size_t i = 0; i < npts; ++i) sorted[i] = points[order[i]];
  // per-path fraction of window grid times in each bin
  std::vector<std::vector<double>> per_path(n_paths);
  parallel_for(static_cast<std::size_t>(n_paths), opts.threads, [&](std::size_t j) {
    Rng rng(seed.child(j));
    const DiffusionPath p = simulate_path(model, label, opts.n_steps, rng);
    const std::size_t start = window_start(p, t0);
    std::vector<double> hits(npts, 0.0);
    const double half = 0.5 * bin_width;
    for (std::size_t k = start; k < p.steps(); ++k) {
      const double xk = p.x[k];
      // bins [p - half, p + half) containing xk have p in (xk - half, xk + half]
      auto it = std::upper_bound(sorted.begin(), sorted.end(), xk - half);
      for (; it != sorted.end() && *it <= xk + half; ++it) {
        const std::size_t i = order[it - sorted.begin()];
        if (xk >= points[i] - half && xk < points[i] + half) hits[i] += 1.0;
      }
    }
    const double count = static_cast<double>(p.steps() - start);
    for (auto& h : hits) h /= count * bin_width;
    per_path[j] = std::move(hits);
  });
  std::vector<MCEstimate> out(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& v : per_path) {
      sum += v[i];
      sum_sq += v[i] * v[i];
    }
    const double mean = sum / n_paths;
    const double var = std::max(0.0, (sum_sq - n_paths * mean * mean) / (n_paths - 1));
    out[i] = {mean, std::sqrt(var / n_paths), n_paths};
  }
  return out;
}

MCEstimate occupation_density_mc(const MixtureModel& model, int label, double x,
                                 double t0, int n_paths, double bin_width,
                                 const SeedSequence& seed,
                                 OccupationOptions opts) {
  const double pt[1] = {x};
  return occupation_density_mc(model, label, pt, t0, n_paths, bin_width, seed, opts)
      .front();
}

void write_paths_csv(std::ostream& out, std::span<const DiffusionPath> paths) {
  out << "path_id,label,t,x\n";
  char buf[128];
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const auto& p = paths[j];
    for (std::size_t k = 0; k < p.x.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%.12g,%.12g\n", j, p.label, p.time(k), p.x[k]);
      out << buf;
    }
  }
}

}  // namespace driftclass
