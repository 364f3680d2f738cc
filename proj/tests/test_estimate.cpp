#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "driftclass/error.hpp"
#include "driftclass/estimate.hpp"
#include "driftclass/kernels.hpp"
#include "driftclass/quadrature.hpp"
#include "oracles.hpp"

using namespace driftclass;

namespace {

MixtureModel zero_vs_bump(double amplitude = 1.0) {
  MixtureModel m;
  m.b0 = make_zero_drift();
  m.b1 = make_bump_drift({-1.0, 1.0}, amplitude);
  return m;
}

std::vector<DiffusionPath> class_paths(const MixtureModel& m, int label, int n, int n_steps,
                                       std::uint64_t seed) {
  std::vector<DiffusionPath> out;
  const SeedSequence s(seed);
  for (int j = 0; j < n; ++j) {
    Rng rng(s.child(j));
    out.push_back(simulate_path(m, label, n_steps, rng));
  }
  return out;
}

// Per-path contributions at one point; their mean is the estimator and their
// spread gives its standard error.
std::pair<std::vector<double>, std::vector<double>> per_path(
    const std::vector<DiffusionPath>& paths, const KernelSpec& k, double h, double t0,
    double x) {
  std::vector<double> f;
  std::vector<double> bf;
  for (const auto& p : paths) {
    double fs = 0.0;
    double bs = 0.0;
    const std::size_t start = window_start(p, t0);
    for (std::size_t s = start; s < p.steps(); ++s) {
      const double w = k((p.x[s] - x) / h) / h;
      fs += w * p.dt();
      bs += w * (p.x[s + 1] - p.x[s]);
    }
    f.push_back(fs / (p.T - t0));
    bf.push_back(bs / (p.T - t0));
  }
  return {f, bf};
}

}  // namespace

TEST_CASE("bandwidth rule") {
  CHECK(bandwidth_rule(1024, 1.0) == doctest::Approx(std::pow(2.0, -10.0 / 3.0)).epsilon(1e-14));
  CHECK(bandwidth_rule(1024, 1.0) == doctest::Approx(0.099213).epsilon(1e-5));
  CHECK_THROWS_AS(bandwidth_rule(1, 1.0), Error);
  const double h = bandwidth_rule(1024, 50.0);
  CHECK(h > std::pow(1024.0, -1.0 / 101.0) - 1e-15);
  CHECK(h < 1.0);
  double prev = 1.0;
  for (long n = 2; n < 100000; n *= 3) {
    CHECK(bandwidth_rule(n, 50.0) < prev);
    prev = bandwidth_rule(n, 50.0);
  }
}

TEST_CASE("grid sums agree with pointwise brute force") {
  const MixtureModel m = zero_vs_bump(2.0);
  const auto paths = class_paths(m, 1, 30, 300, 3);
  const PathRefs r = refs(paths);
  const KernelSpec k = build_legendre_kernel(2);
  const Grid g{-1.3, 1.1, 57};
  const KernelSums a = kernel_sums(r, k, 0.17, 0.1, g);
  const std::vector<double> nodes = g.nodes();
  const KernelSums b = kernel_sums_at(r, k, 0.17, 0.1, nodes);
  for (int j = 0; j < g.points; ++j) {
    CHECK(a.f_hat[j] == doctest::Approx(b.f_hat[j]).epsilon(1e-12).scale(1e-12));
    CHECK(a.bf_hat[j] == doctest::Approx(b.bf_hat[j]).epsilon(1e-12).scale(1e-12));
  }
  // and with the per-path oracle
  const auto [f, bf] = per_path(paths, k, 0.17, 0.1, nodes[20]);
  CHECK(a.f_hat[20] == doctest::Approx(oracle::mean(f)).epsilon(1e-12));
  CHECK(a.bf_hat[20] == doctest::Approx(oracle::mean(bf)).epsilon(1e-12));
}

TEST_CASE("density is exactly zero away from every path") {
  const MixtureModel m = zero_vs_bump();
  const auto paths = class_paths(m, 0, 20, 200, 4);
  double hi = -1e9;
  for (const auto& p : paths) hi = std::max(hi, *std::max_element(p.x.begin(), p.x.end()));
  const Grid g{hi + 0.2, hi + 1.0, 9};
  const KernelSums s = kernel_sums(refs(paths), build_legendre_kernel(2), 0.1, 0.1, g);
  for (int j = 0; j < g.points; ++j) {
    CHECK(s.f_hat[j] == 0.0);
    CHECK(s.bf_hat[j] == 0.0);
  }
}

TEST_CASE("density estimate integrates to one") {
  const MixtureModel m = zero_vs_bump(2.0);
  const auto paths = class_paths(m, 1, 200, 500, 5);
  const Grid g{-6.0, 6.0, 2401};
  const auto f = density_estimate(refs(paths), build_legendre_kernel(2), 0.2, 0.1, g);
  const double integral = quad::trapezoid(f, g.step());
  CHECK(integral >= 0.98);
  CHECK(integral <= 1.02);
}

TEST_CASE("density estimate matches the occupation-density oracle") {
  const MixtureModel m = zero_vs_bump();
  const auto paths = class_paths(m, 0, 500, 500, 6);
  const KernelSpec k = build_legendre_kernel(2);
  const auto [f, bf] = per_path(paths, k, 0.1, 0.1, 0.0);
  const MCEstimate ref = occupation_density_mc(m, 0, 0.0, 0.1, 20000, 0.02, SeedSequence(60));
  const double fhat = density_estimate(refs(paths), k, 0.1, 0.1, Grid{-0.1, 0.1, 3})[1];
  CHECK(fhat == doctest::Approx(oracle::mean(f)).epsilon(1e-12));
  const double se = std::sqrt(oracle::se(f) * oracle::se(f) + ref.se * ref.se);
  CHECK(std::abs(fhat - ref.value) <= 3.0 * se);
}

TEST_CASE("bf estimate under zero drift is a pure martingale") {
  const MixtureModel m = zero_vs_bump();
  const auto paths = class_paths(m, 0, 2000, 200, 7);
  const KernelSpec k = build_legendre_kernel(2);
  for (double x : {-0.5, 0.0, 0.3}) {
    const auto [f, bf] = per_path(paths, k, 0.2, 0.1, x);
    CHECK(std::abs(oracle::mean(bf)) <= 3.0 * oracle::se(bf));
  }
}

TEST_CASE("bf estimate for a bump drift matches b f") {
  const MixtureModel m = zero_vs_bump(2.0);
  const auto paths = class_paths(m, 1, 500, 500, 8);
  const KernelSpec k = build_legendre_kernel(2);
  const double h = bandwidth_rule(1000, 1.0);
  const auto [f, bf] = per_path(paths, k, h, 0.1, 0.0);
  const MCEstimate occ = occupation_density_mc(m, 1, 0.0, 0.1, 20000, 0.02, SeedSequence(80));
  const double target = m.b1(0.0) * occ.value;
  const double se = std::sqrt(oracle::se(bf) * oracle::se(bf) +
                              m.b1(0.0) * m.b1(0.0) * occ.se * occ.se);
  CHECK(std::abs(oracle::mean(bf) - target) <= 3.0 * se);
}

TEST_CASE("truncated ratio") {
  const std::vector<double> f{0.5, 0.05, 0.1, -0.2};
  const std::vector<double> bf{0.25, 7.0, 0.03, 0.4};
  const NWEstimate e = nw_estimate(f, bf, 0.1);
  CHECK(e.b_hat[0] == 0.5);
  CHECK(e.b_hat[1] == 0.0);
  CHECK(e.b_hat[2] == doctest::Approx(0.3));  // f == m is kept
  CHECK(e.b_hat[3] == 0.0);
  CHECK(e.truncated(1));
  CHECK(!e.truncated(2));
  try {
    nw_estimate(f, bf, 0.0);
    FAIL("expected InvalidTruncation");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::InvalidTruncation);
  }
}

TEST_CASE("fit uses the total sample size and ignores the other class") {
  const MixtureModel m = zero_vs_bump(2.0);
  std::vector<DiffusionPath> all = class_paths(m, 1, 4, 100, 9);
  FitConfig cfg;
  cfg.kernel = build_legendre_kernel(2);
  cfg.m = 0.05;
  cfg.grid = Grid{-1.0, 1.0, 41};
  const NWEstimate a = fit_drift(all, 1, cfg);
  CHECK(a.n_class == 4);
  CHECK(a.h == doctest::Approx(std::pow(4.0, -1.0 / 3.0)).epsilon(1e-14));

  auto mixed = simulate_sample(m, 300, 200, SeedSequence(10), 1);
  const NWEstimate before = fit_drift(mixed, 1, cfg);
  for (auto& p : mixed)
    if (p.label == 0)
      for (auto& x : p.x) x += 0.37;
  const NWEstimate after = fit_drift(mixed, 1, cfg);
  CHECK(before.f_hat == after.f_hat);
  CHECK(before.bf_hat == after.bf_hat);
  CHECK(before.b_hat == after.b_hat);
  CHECK(before.n_total == 300);
}

TEST_CASE("fit errors") {
  const MixtureModel m = zero_vs_bump();
  FitConfig cfg;
  cfg.kernel = build_legendre_kernel(2);
  std::vector<DiffusionPath> none;
  try {
    fit_drift(none, 0, cfg);
    FAIL("expected EmptySample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySample);
  }
  auto one = class_paths(m, 1, 5, 50, 11);
  one[0].label = 0;
  try {
    fit_drift(one, 0, cfg);
    FAIL("expected DegenerateClass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateClass);
  }
}

TEST_CASE("zero-drift fit is small (consistency smoke test)") {
  const MixtureModel m = zero_vs_bump();
  const auto paths = class_paths(m, 0, 500, 500, 12);
  FitConfig cfg;
  cfg.kernel = build_legendre_kernel(2);
  cfg.m = 0.1;
  cfg.grid = Grid{-1.0, 1.0, 201};
  cfg.bandwidth = bandwidth_rule(1000, 1.0);
  const NWEstimate e = fit_drift(paths, 0, cfg);
  double sup = 0.0;
  for (double b : e.b_hat) sup = std::max(sup, std::abs(b));
  // Threshold from the estimator's own variance: per-path contributions give
  // the SE of bf_hat at each node, the ratio SE is SE(bf_hat) / f_hat, and the
  // sup over 201 correlated nodes stays within 4.5 of those SEs.
  double threshold = 0.0;
  for (int j = 0; j < cfg.grid.points; j += 5) {
    if (e.truncated(j)) continue;
    const auto [f, bf] = per_path(paths, cfg.kernel, *cfg.bandwidth, cfg.t0, cfg.grid.at(j));
    threshold = std::max(threshold, 4.5 * oracle::se(bf) / e.f_hat[j]);
  }
  CHECK(sup > 0.0);
  CHECK(sup <= threshold);
  CHECK(grid_sup_error(e, m.b0) == sup);
}

TEST_CASE("truncation invariant") {
  const MixtureModel m = zero_vs_bump(2.0);
  const auto paths = simulate_sample(m, 120, 200, SeedSequence(13), 1);
  FitConfig cfg;
  cfg.kernel = build_legendre_kernel(2);
  cfg.m = 0.3;
  cfg.grid = Grid{-2.0, 2.0, 101};
  const NWEstimate e = fit_drift(paths, 1, cfg);
  int truncated = 0;
  for (int j = 0; j < cfg.grid.points; ++j) {
    if (e.f_hat[j] < cfg.m) {
      CHECK(e.b_hat[j] == 0.0);
      ++truncated;
    } else {
      CHECK(e.b_hat[j] * e.f_hat[j] == doctest::Approx(e.bf_hat[j]).epsilon(1e-14));
    }
  }
  CHECK(truncated > 0);  // the far tails of the grid fall below m
}

TEST_CASE("pooled density is the weighted average of the parts") {
  const MixtureModel m = zero_vs_bump(2.0);
  const auto a = class_paths(m, 1, 30, 200, 14);
  const auto b = class_paths(m, 1, 50, 200, 15);
  std::vector<DiffusionPath> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const KernelSpec k = build_legendre_kernel(2);
  const Grid g{-1.5, 1.5, 61};
  const auto fa = density_estimate(refs(a), k, 0.25, 0.1, g);
  const auto fb = density_estimate(refs(b), k, 0.25, 0.1, g);
  const auto fp = density_estimate(refs(pooled), k, 0.25, 0.1, g);
  for (int j = 0; j < g.points; ++j)
    CHECK(fp[j] == doctest::Approx((30.0 * fa[j] + 50.0 * fb[j]) / 80.0).epsilon(1e-13).scale(1e-13));
}

TEST_CASE("interpolated evaluation") {
  const std::vector<double> f{1, 1, 1};
  const std::vector<double> bf{0.0, 2.0, 4.0};
  NWEstimate e = nw_estimate(f, bf, 0.5);
  e.grid = Grid{0.0, 1.0, 3};
  CHECK(e(0.25) == doctest::Approx(1.0));
  CHECK(e(1.0) == 4.0);
  CHECK(e(-0.01) == 0.0);
  CHECK(e(1.01) == 0.0);
}

TEST_CASE("estimate CSV") {
  const std::vector<double> f{1.0, 0.01};
  const std::vector<double> bf{0.5, 0.2};
  NWEstimate e = nw_estimate(f, bf, 0.1);
  e.grid = Grid{0.0, 1.0, 2};
  std::ostringstream out;
  write_estimate_csv(out, e);
  CHECK(out.str() == "x,f_hat,bf_hat,b_hat,truncated\n0,1,0.5,0.5,0\n1,0.01,0.2,0,1\n");
}
