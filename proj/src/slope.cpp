#include "driftclass/slope.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "driftclass/error.hpp"

namespace driftclass {

SlopeFit fit_slope(std::span<const std::pair<double, double>> points) {
  SlopeFit fit;
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [n, v] : points) {
    if (!(v > 0.0) || !(n > 0.0)) {
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(n));
    ly.push_back(std::log(v));
  }
  fit.used = static_cast<int>(lx.size());
  if (fit.used < 3)
    fail(ErrorCode::InsufficientData,
         "slope fit needs >= 3 positive points, got " + std::to_string(fit.used));
  const double k = fit.used;
  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::InsufficientData, "slope fit needs distinct N values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += r * r;
  }
  fit.slope_se = std::sqrt(rss / (k - 2.0) / sxx);
  return fit;
}

}  // namespace driftclass
