#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "driftclass/classify.hpp"
#include "driftclass/error.hpp"
#include "driftclass/kernels.hpp"
#include "oracles.hpp"

using namespace driftclass;

namespace {

MixtureModel zero_vs_bump(double amplitude = 2.0, double p1 = 0.5) {
  MixtureModel m;
  m.b0 = make_zero_drift();
  m.b1 = make_bump_drift({-1.0, 1.0}, amplitude);
  m.p1 = p1;
  return m;
}

DriftFunction constant(double c) {
  return make_custom_drift([c](double) { return c; }, {-1e9, 1e9}, "constant");
}

FitConfig fit_cfg() {
  FitConfig cfg;
  cfg.kernel = build_legendre_kernel(2);
  cfg.m = 0.1;
  cfg.grid = Grid{-1.0, 1.0, 201};
  return cfg;
}

}  // namespace

TEST_CASE("class proportions") {
  const std::vector<int> a{0, 1, 1, 0};
  CHECK(class_proportions(a).p0 == 0.5);
  CHECK(class_proportions(a).p1 == 0.5);
  const std::vector<int> b{1, 1, 1};
  CHECK(class_proportions(b).p0 == 0.0);
  CHECK(class_proportions(b).p1 == 1.0);
  Rng rng(3);
  std::vector<int> draws;
  for (int i = 0; i < 10000; ++i) draws.push_back(rng.bernoulli(0.3));
  const ClassProportions p = class_proportions(draws);
  CHECK(p.p1 >= 0.27);
  CHECK(p.p1 <= 0.33);
  for (int n = 1; n < 200; ++n) {
    std::vector<int> labels(n, 0);
    for (int i = 0; i < n; i += 3) labels[i] = 1;
    const ClassProportions q = class_proportions(labels);
    CHECK(std::abs(q.p0 + q.p1 - 1.0) <= 1e-12);
  }
  const std::vector<int> none;
  CHECK_THROWS_AS(class_proportions(none), Error);
}

TEST_CASE("Girsanov functional identities") {
  const MixtureModel m = zero_vs_bump();
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const DiffusionPath p = simulate_path(m, rep % 2, 500, rng);
    CHECK(girsanov_functional(p, make_zero_drift()) == 0.0);
    for (double c : {-1.3, 0.4, 2.0}) {
      const double expected = c * (p.x.back() - p.x.front()) - c * c * p.T / 2.0;
      CHECK(std::abs(girsanov_functional(p, constant(c)) - expected) <= 1e-12);
    }
    // brute-force double loop
    const double direct = oracle::girsanov_direct(p.x, p.dt(), m.b1);
    CHECK(std::abs(girsanov_functional(p, m.b1) - direct) <= 1e-12);
  }
}

TEST_CASE("regression score special cases") {
  const MixtureModel m = zero_vs_bump(2.0, 0.3);
  Rng rng(6);
  const DiffusionPath p = simulate_path(m, 1, 500, rng);
  // b0 == b1 collapses the mixture to the prior
  ClassifierModel same{m.b1, m.b1, 0.7, 0.3, ClassifierKind::Bayes};
  CHECK(regression_score(same, p) == doctest::Approx(0.3).epsilon(1e-14));
  // p = (1/2, 1/2), b0 = 0: Phi = e^F1 / (1 + e^F1)
  ClassifierModel half{m.b0, m.b1, 0.5, 0.5, ClassifierKind::Bayes};
  const double f1 = girsanov_functional(p, m.b1);
  CHECK(regression_score(half, p) == doctest::Approx(std::exp(f1) / (1.0 + std::exp(f1))).epsilon(1e-14));
}

TEST_CASE("logistic saturation and range") {
  const double s = score_from_functionals(0.5, 0.5, 0.0, 1000.0);
  CHECK(s > 1.0 - 1e-12);
  CHECK(s < 1.0);
  const double t = score_from_functionals(0.5, 0.5, 1000.0, 0.0);
  CHECK(t > 0.0);
  CHECK(t < 1e-12);
  double prev = 0.0;
  for (double z = -800.0; z <= 800.0; z += 0.5) {
    const double v = logistic(z);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("score is invariant to a common shift of both functionals") {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double f0 = 10.0 * (rng.uniform() - 0.5);
    const double f1 = 10.0 * (rng.uniform() - 0.5);
    const double c = 100.0 * (rng.uniform() - 0.5);
    const double p1 = 0.05 + 0.9 * rng.uniform();
    const double a = score_from_functionals(1 - p1, p1, f0, f1);
    const double b = score_from_functionals(1 - p1, p1, f0 + c, f1 + c);
    CHECK(std::abs(a - b) <= 1e-12);
    CHECK((a >= 0.5) == (b >= 0.5));
  }
}

TEST_CASE("tie at one half predicts class 1") {
  const MixtureModel m = zero_vs_bump();
  ClassifierModel tie{m.b1, m.b1, 0.5, 0.5, ClassifierKind::Bayes};
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const DiffusionPath p = simulate_path(m, i % 2, 100, rng);
    CHECK(regression_score(tie, p) == 0.5);
    CHECK(predict(tie, p) == 1);
  }
}

TEST_CASE("constant classifiers have prior risk") {
  for (double p1 : {0.9, 0.1}) {
    MixtureModel m = zero_vs_bump(2.0, p1);
    ClassifierModel constant_g{m.b1, m.b1, 1.0 - p1, p1, ClassifierKind::Bayes};
    const RiskReport r =
        excess_risk_mc(constant_g, constant_g, m, 4000, SeedSequence(12), {100, 1});
    CHECK(std::abs(r.risk - 0.1) <= 3.0 * r.se);
    CHECK(r.excess == 0.0);
  }
}

TEST_CASE("plugin equal to Bayes has zero excess") {
  const MixtureModel m = zero_vs_bump();
  const ClassifierModel bayes = bayes_classifier(m);
  const RiskReport r = excess_risk_mc(bayes, bayes, m, 1000, SeedSequence(13), {200, 1});
  CHECK(r.excess == 0.0);
  CHECK(r.excess_cond == 0.0);
  CHECK(r.excess_se == 0.0);
}

TEST_CASE("complement classifier") {
  const MixtureModel m = zero_vs_bump();
  const ClassifierModel bayes = bayes_classifier(m);
  // swapping drifts and priors gives Phi' = 1 - Phi, the complement rule
  const ClassifierModel flipped{m.b1, m.b0, m.p1, m.p0(), ClassifierKind::Bayes};
  const auto test = simulate_sample(m, 2000, 200, SeedSequence(14), 1);
  const RiskReport r = excess_risk_on(flipped, bayes, test);
  CHECK(r.excess == doctest::Approx(1.0 - 2.0 * r.bayes_risk).epsilon(1e-15));
  CHECK(r.risk + r.bayes_risk == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fitted plugin does not significantly beat Bayes") {
  const MixtureModel m = zero_vs_bump();
  const auto train = simulate_sample(m, 1024, 500, SeedSequence(15), 1);
  std::vector<int> labels;
  for (const auto& p : train) labels.push_back(p.label);
  const ClassifierModel plugin =
      plugin_classifier(fit_drift(train, 0, fit_cfg()), fit_drift(train, 1, fit_cfg()), labels);
  CHECK(plugin.kind == ClassifierKind::Plugin);
  CHECK(plugin.p1 == class_proportions(labels).p1);
  const ClassifierModel bayes = bayes_classifier(m);
  CHECK(bayes.p1 == m.p1);
  const RiskReport r = excess_risk_mc(plugin, bayes, m, 4000, SeedSequence(16), {500, 1});
  CHECK(r.excess >= -2.0 * r.excess_se);
  CHECK(r.excess_cond >= 0.0);
  // the conditional estimator targets the same expectation
  CHECK(std::abs(r.excess - r.excess_cond) <=
        3.0 * std::sqrt(r.excess_se * r.excess_se + r.excess_cond_se * r.excess_cond_se));
}

TEST_CASE("predict has no hidden state") {
  const MixtureModel m = zero_vs_bump();
  const ClassifierModel bayes = bayes_classifier(m);
  Rng rng(17);
  const DiffusionPath p = simulate_path(m, 1, 300, rng);
  const int first = predict(bayes, p);
  for (int i = 0; i < 10; ++i) CHECK(predict(bayes, p) == first);
}

TEST_CASE("predictions CSV") {
  const MixtureModel m = zero_vs_bump();
  const ClassifierModel bayes = bayes_classifier(m);
  const auto test = simulate_sample(m, 3, 50, SeedSequence(18), 1);
  std::ostringstream out;
  write_predictions_csv(out, bayes, bayes, test);
  const std::string s = out.str();
  CHECK(s.rfind("path_id,label,phi,predicted,bayes_predicted\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
