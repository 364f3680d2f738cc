#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftclass/drifts.hpp"

namespace driftclass {

enum class Experiment { Rates, Tails, Margin, Bias, Floor };

std::string_view to_string(Experiment e);

struct DriftConfig {
  DriftKind kind = DriftKind::Zero;
  Interval support{-1.0, 1.0};
  double amplitude = 1.0;
};

enum class ThetaMode { Random, Zero, Ones, Fixed };

struct HypercubeConfig {
  double kappa = 1.0;
  double holder_const = 1.0;  // R
  double kernel_amplitude = 1.0;  // a in K = a K0(2 .)
  ThetaMode theta_mode = ThetaMode::Random;
  std::vector<double> theta;  // ThetaMode::Fixed
};

enum class ExcessEstimator { Conditional, Labels };

struct ExperimentConfig {
  Experiment experiment = Experiment::Rates;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int threads = 0;

  // model
  DriftConfig drift0{DriftKind::Zero, {-1.0, 1.0}, 1.0};
  DriftConfig drift1{DriftKind::Bump, {-1.0, 1.0}, 1.0};
  HypercubeConfig hypercube;
  double p1 = 0.5;
  double x0 = 0.0;
  double T = 1.0;
  double t0 = 0.1;
  int n_steps = 500;

  // estimation
  double beta = 1.0;
  int gamma = 2;
  std::optional<double> m;  // empty: pilot rule
  int pilot_paths = 10000;
  double pilot_bin = 0.05;
  int grid_points = 201;
  std::optional<Interval> grid;

  // campaign
  std::vector<long> N{64, 128, 256, 512, 1024, 2048, 4096};
  int replicates = 50;
  long n_test = 4000;
  ExcessEstimator excess = ExcessEstimator::Conditional;
  double slope_lo = -1.0;
  double slope_hi = -0.35;

  // tails
  int tails_class = 1;
  std::vector<double> tails_delta;  // explicit deltas
  bool tails_delta_rule = true;     // also add delta_N = h^beta log N

  // margin
  std::vector<double> margin_eps{0.02, 0.04, 0.08};
  int margin_paths = 10000;
  double margin_span = 3.0;
  int zt_bins = 50;

  // bias
  std::optional<double> bias_x;  // default x0
  double bias_h = 0.4;
  int bias_paths = 500;
  int bias_class = 0;
  int bias_reference_paths = 10000;
  double bias_reference_bin = 0.01;
  double bias_ratio_lo = 1.4;
  double bias_ratio_hi = 2.8;
};

/// Parses `key = value` lines with `#` comments.  Unknown keys, duplicates,
/// malformed values and missing `experiment` are Config errors naming the
/// key and line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Cross-field checks (N strictly increasing, t0 < T, ...).
void validate(const ExperimentConfig& cfg);

/// Keys accepted by the parser, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace driftclass
