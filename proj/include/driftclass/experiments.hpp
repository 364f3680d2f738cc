#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "driftclass/bounds.hpp"
#include "driftclass/config.hpp"
#include "driftclass/csv.hpp"
#include "driftclass/estimate.hpp"
#include "driftclass/simulate.hpp"
#include "driftclass/slope.hpp"

namespace driftclass {

enum class Verdict { Pass, Fail, Inconclusive, NotApplicable };

std::string_view to_string(Verdict v);

struct RateRow {
  long N = 0;
  double mean_excess = 0.0;
  double median_excess = 0.0;
  double se = 0.0;
  long degenerate_count = 0;
  int replicates = 0;
  double mean_excess_labels = 0.0;  // label-based excess on the same tests
  double se_labels = 0.0;
  double mean_risk = 0.0;
  double mean_bayes_risk = 0.0;
  int cells = 0;  // D for the hypercube family, else 0
};

struct RateReport {
  std::vector<RateRow> rows;
  std::optional<SlopeFit> fit;
  double theory_slope = 0.0;  // -2 beta / (2 beta + 1)
  Verdict slope_verdict = Verdict::NotApplicable;
  // floor campaign only
  double floor_c = 0.0;
  Verdict floor_verdict = Verdict::NotApplicable;
  Verdict positivity_verdict = Verdict::NotApplicable;

  Table table() const;
  Table summary() const;
};

/// Slope of log mean_excess on log N over rows with positive means.
std::optional<SlopeFit> rate_slope(const std::vector<RateRow>& rows);

struct TailRow {
  long N = 0;
  double delta = 0.0;
  Frequency freq;
  double bound = 0.0;
  double mean_class_size = 0.0;
  Verdict verdict = Verdict::NotApplicable;
};

struct BiasRow {
  std::string quantity;  // f_hat or bf_hat
  double h = 0.0;
  double estimate = 0.0;
  double reference = 0.0;
  double bias = 0.0;
  double se = 0.0;
};

struct BiasVerdict {
  std::string quantity;
  double ratio = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// ratio = |bias(h)| / |bias(h/2)|; Inconclusive unless both exceed 3 SE.
BiasVerdict bias_halving_verdict(const std::string& quantity, double bias_h,
                                 double se_h, double bias_half,
                                 double se_half, double lo, double hi);

/// One finished campaign: CSV tables keyed by file name and an overall flag.
struct ExperimentResult {
  std::vector<std::pair<std::string, Table>> tables;
  bool falsified = false;
  std::vector<std::string> notes;
};

/// The mixture model described by the config (hypercube drifts use theta
/// according to the config; `cells` overrides D when positive).
MixtureModel build_model(const ExperimentConfig& cfg, int cells = 0,
                         const std::vector<double>* theta = nullptr);

/// Pilot-rule truncation level m = max(1e-3, 0.5 min_grid f_i) over both
/// classes, plus the max of each f_i on the grid (for ||f_i||_inf).
struct PilotDensity {
  double m = 0.0;
  std::array<double, 2> f_sup{};
  std::array<double, 2> f_min{};
};

PilotDensity pilot_density(const MixtureModel& model, const ExperimentConfig& cfg,
                           const SeedSequence& seed);

/// Evaluation grid for class `label`: the drift's support, or the hull of the
/// non-zero supports for a zero drift; `grid.lo/hi` override both.
Grid class_grid(const ExperimentConfig& cfg, const MixtureModel& model,
                int label);

RateReport run_rate_experiment(const ExperimentConfig& cfg);
RateReport run_floor_experiment(const ExperimentConfig& cfg);
std::vector<TailRow> run_tail_experiment(const ExperimentConfig& cfg);
std::vector<BiasRow> run_bias_experiment(const ExperimentConfig& cfg,
                                         std::vector<BiasVerdict>* verdicts);

/// Runs the configured experiment and collects its tables.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes every table of `result` into `dir` as <name>.
void write_result(const ExperimentResult& result,
                  const std::filesystem::path& dir);

}  // namespace driftclass
