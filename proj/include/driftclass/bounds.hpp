#pragma once

#include <array>
#include <span>
#include <vector>

#include "driftclass/estimate.hpp"
#include "driftclass/kernels.hpp"
#include "driftclass/simulate.hpp"

namespace driftclass {

struct BoundInputs {
  double m = 0.0;
  std::array<double, 2> f_sup{};  // ||f_i||_inf
  std::array<double, 2> b_sup{};  // ||b_i*||_inf
  double kernel_l2_sq = 0.0;      // ||K||^2
  double kernel_sup = 0.0;        // ||K||_inf
  double T = 1.0;
  double t0 = 0.1;
};

/// Constants of the exponential inequality for the truncated NW estimator:
///   C  = min_i min{ m^2 / (576 |f_i| |b_i|^2 |K|^2),
///                   m^2 (T - t0) / (2304 |f_i| |K|^2) }
///   C' = min_i m^2 / (32 |f_i| |K|^2 + 16 m |K|_inf / 3)
struct BoundConstants {
  double C = 0.0;
  double Cprime = 0.0;
  BoundInputs inputs;
};

BoundConstants compute_constants(double m, std::array<double, 2> f_sup,
                                 std::array<double, 2> b_sup,
                                 const KernelSpec& k, double T, double t0);
BoundConstants compute_constants(const BoundInputs& in);

struct BoundTerms {
  double variance = 0.0;   // 6 exp(-C N_i delta^2 h)
  double excursion = 0.0;  // N_i exp(-(T - t0) log^2 N / (2 |K|_inf^2))
  double truncation = 0.0; // (6 |b_i| / delta) exp(-C' N_i h)

  double total() const { return variance + excursion + truncation; }
};

/// Terms at an explicit log N (exp_bound passes log of the sample size).
BoundTerms exp_bound_terms(double C, double Cprime, double kernel_sup,
                           double window, double delta, long n_class, double h,
                           double b_sup, double log_n);

/// The three-term bound; may exceed 1 and is +inf at delta == 0.
double exp_bound(const BoundConstants& c, double delta, long n_class, double h,
                 double b_sup, long n_total);

/// delta_N = h_N^beta log N.
double delta_rule(long n, double beta);

struct SupErrorSample {
  std::vector<double> errors;    // one per non-degenerate replicate
  std::vector<long> class_sizes; // N_i of the same replicates
  long degenerate = 0;
};

/// Replicate r draws N labeled paths from seed.child(r), fits class `label`
/// and records the grid sup-error against the true drift.
SupErrorSample sup_error_sample(const MixtureModel& model, int label, long n,
                                const FitConfig& fit, int n_steps,
                                int n_replicates, const SeedSequence& seed,
                                int threads = 1);

struct Frequency {
  double frequency = 0.0;
  double se = 0.0;
  long n = 0;
  long degenerate = 0;
};

/// Fraction of replicates whose sup-error is >= delta.
Frequency tail_frequency(const SupErrorSample& sample, double delta);

Frequency tail_probability_mc(const MixtureModel& model, int label, double delta,
                              long n, const FitConfig& fit, int n_steps,
                              int n_replicates, const SeedSequence& seed,
                              int threads = 1);

/// Bayes regression scores Phi*(X) on n_paths fresh mixture paths.
std::vector<double> bayes_scores(const MixtureModel& model, int n_paths,
                                 int n_steps, const SeedSequence& seed,
                                 int threads = 1);

/// Frequency of 0 < |Phi - 1/2| <= eps over precomputed scores.
Frequency margin_frequency(std::span<const double> scores, double eps);

/// Requires eps in (0, 1/8).
Frequency margin_probe(const MixtureModel& model, double eps, int n_paths,
                       int n_steps, const SeedSequence& seed, int threads = 1);

struct ZtSample {
  std::vector<double> z;          // int (b1 - b0)(X) dW per path
  std::vector<double> quadratic;  // int (b1 - b0)^2(X) dt per path
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;
  double isometry = 0.0;     // mean of `quadratic`
  double isometry_gap_se = 0.0;  // SE of mean((z - mean)^2 - quadratic)
};

ZtSample zt_sample(const MixtureModel& model, int n_paths, int n_steps,
                   const SeedSequence& seed, int threads = 1);

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> density;

  double max_density() const;
};

Histogram histogram(std::span<const double> values, double lo, double hi,
                    int bins);

}  // namespace driftclass
