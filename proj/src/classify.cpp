#include "driftclass/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "driftclass/error.hpp"
#include "driftclass/parallel.hpp"

namespace driftclass {

ClassProportions class_proportions(std::span<const int> labels) {
  if (labels.empty()) fail(ErrorCode::EmptySample, "no labels");
  long ones = 0;
  for (int y : labels) ones += (y == 1);
  ClassProportions p;
  p.p1 = static_cast<double>(ones) / static_cast<double>(labels.size());
  p.p0 = static_cast<double>(static_cast<long>(labels.size()) - ones) /
         static_cast<double>(labels.size());
  // the two quotients may round apart; re-derive p0 so the pair sums to 1
  if (p.p0 + p.p1 != 1.0) p.p0 = 1.0 - p.p1;
  return p;
}

ClassifierModel bayes_classifier(const MixtureModel& model) {
  return ClassifierModel{model.b0, model.b1, model.p0(), model.p1, ClassifierKind::Bayes};
}

ClassifierModel plugin_classifier(NWEstimate b0, NWEstimate b1,
                                  std::span<const int> labels) {
  const ClassProportions p = class_proportions(labels);
  return ClassifierModel{std::move(b0), std::move(b1), p.p0, p.p1, ClassifierKind::Plugin};
}

double logistic(double z) {
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  constexpr double lo = std::numeric_limits<double>::min();
  double v;
  if (z >= 0.0) {
    v = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    v = e / (1.0 + e);
  }
  return std::clamp(v, lo, hi);
}

double score_from_functionals(double p0, double p1, double f0, double f1) {
  return logistic(std::log(p1 / p0) + (f1 - f0));
}

double regression_score(const ClassifierModel& model, const DiffusionPath& path) {
  const double f0 = girsanov_functional(path, model.b0);
  const double f1 = girsanov_functional(path, model.b1);
  return score_from_functionals(model.p0, model.p1, f0, f1);
}

int predict(const ClassifierModel& model, const DiffusionPath& path) {
  return regression_score(model, path) >= 0.5 ? 1 : 0;
}

RiskReport excess_risk_on(const ClassifierModel& plugin,
                          const ClassifierModel& bayes,
                          std::span<const DiffusionPath> test) {
  if (test.empty()) fail(ErrorCode::EmptySample, "no test paths");
  const auto n = static_cast<long>(test.size());
  long err = 0;
  long bayes_err = 0;
  double diff_sq = 0.0;
  double cond = 0.0;
  double cond_sq = 0.0;
  for (const auto& p : test) {
    const double phi_star = regression_score(bayes, p);
    const int g_star = phi_star >= 0.5 ? 1 : 0;
    const int g = predict(plugin, p);
    const int e = g != p.label;
    const int e_star = g_star != p.label;
    err += e;
    bayes_err += e_star;
    diff_sq += static_cast<double>((e - e_star) * (e - e_star));
    const double c = g != g_star ? std::abs(2.0 * phi_star - 1.0) : 0.0;
    cond += c;
    cond_sq += c * c;
  }
  RiskReport r;
  r.n_test = n;
  const double nd = static_cast<double>(n);
  r.risk = err / nd;
  r.bayes_risk = bayes_err / nd;
  r.excess = r.risk - r.bayes_risk;
  r.se = std::sqrt(r.risk * (1.0 - r.risk) / nd);
  if (n > 1) {
    const double var = std::max(0.0, (diff_sq - nd * r.excess * r.excess) / (nd - 1.0));
    r.excess_se = std::sqrt(var / nd);
  }
  r.excess_cond = cond / nd;
  if (n > 1) {
    const double var = std::max(0.0, (cond_sq - nd * r.excess_cond * r.excess_cond) / (nd - 1.0));
    r.excess_cond_se = std::sqrt(var / nd);
  }
  return r;
}

RiskReport excess_risk_mc(const ClassifierModel& plugin,
                          const ClassifierModel& bayes,
                          const MixtureModel& model, long n_test,
                          const SeedSequence& seed, TestOptions opts) {
  if (n_test < 1) fail(ErrorCode::InvalidArgument, "n_test must be >= 1");
  const auto test = simulate_sample(model, static_cast<std::size_t>(n_test),
                                    opts.n_steps, seed, opts.threads);
  return excess_risk_on(plugin, bayes, test);
}

void write_predictions_csv(std::ostream& out, const ClassifierModel& plugin,
                           const ClassifierModel& bayes,
                           std::span<const DiffusionPath> test) {
  out << "path_id,label,phi,predicted,bayes_predicted\n";
  char buf[128];
  for (std::size_t j = 0; j < test.size(); ++j) {
    const double phi = regression_score(plugin, test[j]);
    std::snprintf(buf, sizeof buf, "%zu,%d,%.12g,%d,%d\n", j, test[j].label, phi,
                  phi >= 0.5 ? 1 : 0, predict(bayes, test[j]));
    out << buf;
  }
}

}  // namespace driftclass
