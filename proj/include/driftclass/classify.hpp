#pragma once

#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "driftclass/drifts.hpp"
#include "driftclass/estimate.hpp"
#include "driftclass/simulate.hpp"

namespace driftclass {

/// Either a true drift or a fitted estimate.
class EvaluableDrift {
 public:
  EvaluableDrift(DriftFunction d) : impl_(std::move(d)) {}  // NOLINT
  EvaluableDrift(NWEstimate e) : impl_(std::move(e)) {}     // NOLINT

  double operator()(double x) const {
    return std::visit([x](const auto& d) { return d(x); }, impl_);
  }

 private:
  std::variant<DriftFunction, NWEstimate> impl_;
};

enum class ClassifierKind { Bayes, Plugin };

struct ClassifierModel {
  EvaluableDrift b0;
  EvaluableDrift b1;
  double p0 = 0.5;
  double p1 = 0.5;
  ClassifierKind kind = ClassifierKind::Bayes;

  const EvaluableDrift& drift(int label) const { return label == 1 ? b1 : b0; }
};

ClassifierModel bayes_classifier(const MixtureModel& model);
ClassifierModel plugin_classifier(NWEstimate b0, NWEstimate b1,
                                  std::span<const int> labels);

struct ClassProportions {
  double p0 = 0.0;
  double p1 = 0.0;
};

ClassProportions class_proportions(std::span<const int> labels);

/// F_b(X) = int b(X) dX - 1/2 int b(X)^2 dt.
template <class B>
double girsanov_functional(const DiffusionPath& path, const B& b) {
  const double ito = ito_integral(path, b);
  const double quad =
      time_integral(path, [&b](double x) { const double v = b(x); return v * v; });
  return ito - 0.5 * quad;
}

/// Numerically safe logistic, clamped to the open interval (0, 1).
double logistic(double z);

/// Phi from the log-likelihood ratio pieces: logistic(log(p1/p0) + F1 - F0).
double score_from_functionals(double p0, double p1, double f0, double f1);

double regression_score(const ClassifierModel& model, const DiffusionPath& path);

/// 1 iff regression_score >= 1/2.
int predict(const ClassifierModel& model, const DiffusionPath& path);

struct RiskReport {
  double risk = 0.0;
  double bayes_risk = 0.0;
  double excess = 0.0;  // risk - bayes_risk on the shared test set
  long n_test = 0;
  double se = 0.0;      // sqrt(risk (1 - risk) / n_test)
  double excess_se = 0.0;  // SE of the paired per-path loss difference
  /// Mean of |2 Phi*(X) - 1| 1{g(X) != g*(X)}: the excess risk with the
  /// label noise integrated out.  Same expectation as `excess`.
  double excess_cond = 0.0;
  double excess_cond_se = 0.0;
};

struct TestOptions {
  int n_steps = 500;
  int threads = 1;
};

/// Both classifiers scored on the same fresh test paths (path j from
/// seed.child(j)).
RiskReport excess_risk_mc(const ClassifierModel& plugin,
                          const ClassifierModel& bayes,
                          const MixtureModel& model, long n_test,
                          const SeedSequence& seed, TestOptions opts = {});

/// Same computation for test paths that already exist.
RiskReport excess_risk_on(const ClassifierModel& plugin,
                          const ClassifierModel& bayes,
                          std::span<const DiffusionPath> test);

/// CSV `path_id,label,phi,predicted,bayes_predicted`.
void write_predictions_csv(std::ostream& out, const ClassifierModel& plugin,
                           const ClassifierModel& bayes,
                           std::span<const DiffusionPath> test);

}  // namespace driftclass
