#pragma once

#include <span>
#include <utility>

namespace driftclass {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  int used = 0;
  int excluded = 0;  // points with value <= 0
};

/// OLS of log(value) on log(N).  Needs at least 3 positive values.
SlopeFit fit_slope(std::span<const std::pair<double, double>> points);

}  // namespace driftclass
