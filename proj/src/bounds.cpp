#include "driftclass/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftclass/classify.hpp"
#include "driftclass/error.hpp"
#include "driftclass/parallel.hpp"

namespace driftclass {

BoundConstants compute_constants(const BoundInputs& in) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      fail(ErrorCode::InvalidConstant, std::string(name) + " must be finite and > 0");
  };
  positive(in.m, "m");
  positive(in.f_sup[0], "||f_0||");
  positive(in.f_sup[1], "||f_1||");
  positive(in.b_sup[0], "||b_0||");
  positive(in.b_sup[1], "||b_1||");
  positive(in.kernel_l2_sq, "||K||^2");
  positive(in.kernel_sup, "||K||_inf");
  positive(in.T, "T");
  if (!(in.t0 >= 0.0 && in.t0 < in.T))
    fail(ErrorCode::InvalidConstant, "t0 must lie in [0, T)");

  const double m2 = in.m * in.m;
  const double k2 = in.kernel_l2_sq;
  BoundConstants c;
  c.inputs = in;
  c.C = std::numeric_limits<double>::infinity();
  c.Cprime = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const double f = in.f_sup[i];
    const double b = in.b_sup[i];
    const double first = m2 / (576.0 * f * b * b * k2);
    const double second = m2 * (in.T - in.t0) / (2304.0 * f * k2);
    c.C = std::min({c.C, first, second});
    c.Cprime = std::min(c.Cprime, m2 / (32.0 * f * k2 + 16.0 * in.m * in.kernel_sup / 3.0));
  }
  return c;
}

BoundConstants compute_constants(double m, std::array<double, 2> f_sup,
                                 std::array<double, 2> b_sup,
                                 const KernelSpec& k, double T, double t0) {
  BoundInputs in;
  in.m = m;
  in.f_sup = f_sup;
  in.b_sup = b_sup;
  in.kernel_l2_sq = k.l2_norm * k.l2_norm;
  in.kernel_sup = k.sup_norm;
  in.T = T;
  in.t0 = t0;
  return compute_constants(in);
}

BoundTerms exp_bound_terms(double C, double Cprime, double kernel_sup,
                           double window, double delta, long n_class, double h,
                           double b_sup, double log_n) {
  const double ni = static_cast<double>(n_class);
  const double logn = log_n;
  BoundTerms t;
  t.variance = 6.0 * std::exp(-C * ni * delta * delta * h);
  t.excursion = ni * std::exp(-window * logn * logn / (2.0 * kernel_sup * kernel_sup));
  t.truncation = delta > 0.0 ? 6.0 * b_sup / delta * std::exp(-Cprime * ni * h)
                             : std::numeric_limits<double>::infinity();
  return t;
}

double exp_bound(const BoundConstants& c, double delta, long n_class, double h,
                 double b_sup, long n_total) {
  return exp_bound_terms(c.C, c.Cprime, c.inputs.kernel_sup, c.inputs.T - c.inputs.t0,
                         delta, n_class, h, b_sup, std::log(static_cast<double>(n_total)))
      .total();
}

double delta_rule(long n, double beta) {
  return std::pow(bandwidth_rule(n, beta), beta) * std::log(static_cast<double>(n));
}

SupErrorSample sup_error_sample(const MixtureModel& model, int label, long n,
                                const FitConfig& fit, int n_steps,
                                int n_replicates, const SeedSequence& seed,
                                int threads) {
  struct Slot {
    double error = 0.0;
    long n_class = 0;
    bool degenerate = false;
  };
  std::vector<Slot> slots(n_replicates);
  const DriftFunction& truth = model.drift(label);
  parallel_for(static_cast<std::size_t>(n_replicates), threads, [&](std::size_t r) {
    const auto paths = simulate_sample(model, static_cast<std::size_t>(n), n_steps,
                                       seed.child(r), 1);
    try {
      const NWEstimate est = fit_drift(paths, label, fit);
      slots[r] = {grid_sup_error(est, truth), est.n_class, false};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateClass) throw;
      slots[r].degenerate = true;
    }
  });
  SupErrorSample out;
  for (const auto& s : slots) {
    if (s.degenerate) {
      ++out.degenerate;
      continue;
    }
    out.errors.push_back(s.error);
    out.class_sizes.push_back(s.n_class);
  }
  return out;
}

namespace {

Frequency frequency_of(long hits, long n, long degenerate) {
  Frequency f;
  f.n = n;
  f.degenerate = degenerate;
  if (n == 0) return f;
  f.frequency = static_cast<double>(hits) / static_cast<double>(n);
  f.se = std::sqrt(f.frequency * (1.0 - f.frequency) / static_cast<double>(n));
  return f;
}

}  // namespace

Frequency tail_frequency(const SupErrorSample& sample, double delta) {
  long hits = 0;
  for (double e : sample.errors) hits += e >= delta;
  return frequency_of(hits, static_cast<long>(sample.errors.size()), sample.degenerate);
}

Frequency tail_probability_mc(const MixtureModel& model, int label, double delta,
                              long n, const FitConfig& fit, int n_steps,
                              int n_replicates, const SeedSequence& seed,
                              int threads) {
  if (n_replicates < 50) fail(ErrorCode::InvalidArgument, "tail probability needs >= 50 replicates");
  return tail_frequency(
      sup_error_sample(model, label, n, fit, n_steps, n_replicates, seed, threads), delta);
}

std::vector<double> bayes_scores(const MixtureModel& model, int n_paths,
                                 int n_steps, const SeedSequence& seed,
                                 int threads) {
  const ClassifierModel bayes = bayes_classifier(model);
  std::vector<double> out(n_paths);
  parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t j) {
    Rng rng(seed.child(j));
    const DiffusionPath p = simulate_labeled_path(model, n_steps, rng);
    out[j] = regression_score(bayes, p);
  });
  return out;
}

Frequency margin_frequency(std::span<const double> scores, double eps) {
  long hits = 0;
  for (double phi : scores) {
    const double gap = std::abs(phi - 0.5);
    hits += gap > 0.0 && gap <= eps;
  }
  return frequency_of(hits, static_cast<long>(scores.size()), 0);
}

Frequency margin_probe(const MixtureModel& model, double eps, int n_paths,
                       int n_steps, const SeedSequence& seed, int threads) {
  if (!(eps > 0.0 && eps < 0.125))
    fail(ErrorCode::OutOfRange, "margin probe needs eps in (0, 1/8)");
  return margin_frequency(bayes_scores(model, n_paths, n_steps, seed, threads), eps);
}

ZtSample zt_sample(const MixtureModel& model, int n_paths, int n_steps,
                   const SeedSequence& seed, int threads) {
  if (drift_sup_distance(model.b0, model.b1, 2001) == 0.0)
    fail(ErrorCode::DegenerateModel, "Z_T needs b0 != b1");
  if (n_paths < 2) fail(ErrorCode::InvalidArgument, "n_paths must be >= 2");
  ZtSample out;
  out.z.resize(n_paths);
  out.quadratic.resize(n_paths);
  parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t j) {
    Rng rng(seed.child(j));
    const DiffusionPath p = simulate_labeled_path(model, n_steps, rng);
    double z = 0.0;
    double q = 0.0;
    for (std::size_t k = 0; k < p.steps(); ++k) {
      const double gap = model.b1(p.x[k]) - model.b0(p.x[k]);
      z += gap * p.dW[k];
      q += gap * gap;
    }
    out.z[j] = z;
    out.quadratic[j] = q * p.dt();
  });
  const double n = n_paths;
  double sum = 0.0;
  double sum_q = 0.0;
  for (int j = 0; j < n_paths; ++j) {
    sum += out.z[j];
    sum_q += out.quadratic[j];
  }
  out.mean = sum / n;
  out.isometry = sum_q / n;
  double ss = 0.0;
  for (double z : out.z) ss += (z - out.mean) * (z - out.mean);
  out.variance = ss / (n - 1.0);
  out.mean_se = std::sqrt(out.variance / n);
  // paired differences (z - mean)^2 - q estimate variance - isometry
  double d_sum = 0.0;
  double d_sq = 0.0;
  for (int j = 0; j < n_paths; ++j) {
    const double d = (out.z[j] - out.mean) * (out.z[j] - out.mean) - out.quadratic[j];
    d_sum += d;
    d_sq += d * d;
  }
  const double d_mean = d_sum / n;
  out.isometry_gap_se = std::sqrt(std::max(0.0, (d_sq - n * d_mean * d_mean) / (n - 1.0)) / n);
  return out;
}

double Histogram::max_density() const {
  return density.empty() ? 0.0 : *std::max_element(density.begin(), density.end());
}

Histogram histogram(std::span<const double> values, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) fail(ErrorCode::InvalidArgument, "histogram needs bins >= 1 and hi > lo");
  Histogram h;
  h.lo = lo;
  h.width = (hi - lo) / bins;
  h.density.assign(bins, 0.0);
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    const int b = std::min(bins - 1, static_cast<int>((v - lo) / h.width));
    h.density[b] += 1.0;
  }
  const double norm = static_cast<double>(values.size()) * h.width;
  for (auto& d : h.density) d /= norm;
  return h;
}

}  // namespace driftclass
