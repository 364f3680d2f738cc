// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.
//
// Criteria 4-9 run the shipped presets through the library; criterion 10
// reruns every preset through the CLI with a different thread count and
// compares the CSV bytes against the library output.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "driftclass/classify.hpp"
#include "driftclass/config.hpp"
#include "driftclass/csv.hpp"
#include "driftclass/error.hpp"
#include "driftclass/estimate.hpp"
#include "driftclass/experiments.hpp"
#include "driftclass/kernels.hpp"
#include "driftclass/simulate.hpp"

using namespace driftclass;
namespace fs = std::filesystem;

namespace {

constexpr int kLibraryThreads = 2;  // the CLI reruns use 1
const fs::path kOut = fs::temp_directory_path() / "driftclass_acceptance";

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds,
            double budget) {
  const bool ok = o.pass && seconds < budget;
  if (!ok) ++failures;
  std::printf("%s  criterion %2d  %-28s %s [%.1f s, budget %.0f s]\n", ok ? "PASS" : "FAIL", id,
              name.c_str(), o.detail.c_str(), seconds, budget);
  std::fflush(stdout);
}

template <class Fn>
void criterion(int id, const std::string& name, double budget, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, name, o, s, budget);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c = load_config(std::string(DRIFTCLASS_PRESETS) + "/" + name + ".conf");
  c.threads = kLibraryThreads;
  c.output_dir = (kOut / "lib" / name).string();
  return c;
}

// Row of a quantity table by name: value and parsed params.
struct Quantity {
  double value = std::numeric_limits<double>::quiet_NaN();
  nlohmann::json params;
};

Quantity quantity(const Table& t, const std::string& name) {
  for (const auto& row : t.rows) {
    if (std::get<std::string>(row[0]) != name) continue;
    Quantity q;
    q.value = std::get<double>(row[1]);
    q.params = nlohmann::json::parse(std::get<std::string>(row[4]));
    return q;
  }
  fail(ErrorCode::InvalidArgument, "no quantity '" + name + "'");
}

std::vector<Quantity> quantities(const Table& t, const std::string& name) {
  std::vector<Quantity> out;
  for (const auto& row : t.rows)
    if (std::get<std::string>(row[0]) == name)
      out.push_back({std::get<double>(row[1]),
                     nlohmann::json::parse(std::get<std::string>(row[4]))});
  return out;
}

const Table& table_named(const ExperimentResult& r, const std::string& name) {
  for (const auto& [n, t] : r.tables)
    if (n == name) return t;
  fail(ErrorCode::InvalidArgument, "no table '" + name + "'");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Library tables per preset, kept for the byte comparison in criterion 10.
std::vector<std::pair<std::string, ExperimentResult>> library_runs;

void keep(const std::string& preset_name, ExperimentResult r) {
  write_result(r, kOut / "lib" / preset_name);
  library_runs.emplace_back(preset_name, std::move(r));
}

ExperimentResult rate_tables(const RateReport& r, const std::string& name) {
  ExperimentResult res;
  res.tables.emplace_back(name + ".csv", r.table());
  res.tables.emplace_back(name + "_summary.csv", r.summary());
  return res;
}

Outcome kernel_moments() {
  double worst = 0.0;
  for (int gamma : {2, 4}) {
    const KernelSpec k = build_legendre_kernel(gamma);
    worst = std::max(worst, std::abs(kernel_moment(k, 0) - 1.0));
    for (int p = 1; p <= gamma; ++p) worst = std::max(worst, std::abs(kernel_moment(k, p)));
  }
  return {worst <= 1e-8, fmt("max moment error %.3g (limit 1e-8)", worst)};
}

Outcome exact_identities() {
  double worst = 0.0;
  auto track = [&](double err) { worst = std::max(worst, std::abs(err)); };
  MixtureModel m;
  m.b0 = make_zero_drift();
  m.b1 = make_bump_drift({-1.0, 1.0}, 2.0);
  Rng rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const DiffusionPath p = simulate_path(m, rep % 2, 500, rng);
    track(ito_integral(p, [](double) { return 1.0; }) - (p.x.back() - p.x.front()));
    for (double c : {-1.5, 0.3, 2.0}) {
      const DriftFunction b = make_custom_drift([c](double) { return c; }, {-1e9, 1e9}, "c");
      track(girsanov_functional(p, b) - (c * (p.x.back() - p.x.front()) - c * c * p.T / 2));
    }
  }
  std::vector<double> f;
  std::vector<double> bf;
  for (int j = 0; j < 1000; ++j) {
    f.push_back(rng.uniform() - 0.1);
    bf.push_back(rng.normal());
  }
  const NWEstimate e = nw_estimate(f, bf, 0.3);
  for (int j = 0; j < 1000; ++j) track(f[j] < 0.3 ? e.b_hat[j] : e.b_hat[j] - bf[j] / f[j]);
  for (int n = 1; n < 300; ++n) {
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) labels.push_back(rng.bernoulli(0.4));
    const ClassProportions q = class_proportions(labels);
    track(q.p0 + q.p1 - 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    const double p1 = 0.01 + 0.98 * rng.uniform();
    const double f0 = 10 * rng.normal();
    const double f1 = 10 * rng.normal();
    const double c = 100 * rng.normal();
    track(score_from_functionals(1 - p1, p1, f0, f1) -
          score_from_functionals(1 - p1, p1, f0 + c, f1 + c));
  }
  return {worst <= 1e-12, fmt("max deviation %.3g (limit 1e-12)", worst)};
}

Outcome normalization() {
  MixtureModel m;
  m.b0 = make_zero_drift();
  m.b1 = make_bump_drift({-1.0, 1.0}, 2.0);
  std::vector<DiffusionPath> paths;
  Rng rng(303);
  for (int i = 0; i < 200; ++i) paths.push_back(simulate_path(m, 1, 500, rng));
  std::vector<const DiffusionPath*> ptrs;
  for (const auto& p : paths) ptrs.push_back(&p);
  const Grid g{-6.0, 6.0, 2401};
  const auto f = density_estimate(ptrs, build_legendre_kernel(2), bandwidth_rule(200, 1.0), 0.1, g);
  double trap = 0.0;
  for (int j = 1; j < g.points; ++j) trap += 0.5 * (f[j] + f[j - 1]) * g.step();
  return {trap >= 0.98 && trap <= 1.02, fmt("integral %.6f (window [0.98, 1.02])", trap)};
}

Outcome bias_order() {
  const ExperimentConfig c = preset("bias");
  ExperimentResult r = run_experiment(c);
  const Quantity q = quantity(table_named(r, "bias_summary.csv"), "f_hat_bias_ratio");
  const std::string verdict = q.params.at("verdict");
  keep("bias", std::move(r));
  return {verdict == "pass" || verdict == "inconclusive",
          "f_hat ratio " + fmt("%.3f", q.value) + " (window [1.4, 2.8]), verdict " + verdict};
}

Outcome tail_dominance() {
  bool ok = true;
  int informative = 0;
  int rows = 0;
  std::string worst;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 3; ++s) {
    ExperimentConfig c = preset("tails");
    c.seed += s;
    ExperimentResult r = run_experiment(c);
    const Table& t = table_named(r, "tails.csv");
    for (const auto& row : t.rows) {
      ++rows;
      const double freq = std::get<double>(row[2]);
      const double se = std::get<double>(row[3]);
      const double bound = std::get<double>(row[6]);
      if (!(bound <= 1.0)) continue;
      ++informative;
      const double margin = freq - (bound + 3.0 * se);
      if (margin > worst_margin) worst_margin = margin;
      if (margin > 0.0) ok = false;
    }
    if (s == 0) keep("tails", std::move(r));
  }
  // a check with no informative rows would be vacuous
  return {ok && informative > 0,
          std::to_string(informative) + "/" + std::to_string(rows) +
              " rows with bound <= 1 over 3 seeds, max(freq - bound - 3 SE) " +
              fmt("%.3g", worst_margin)};
}

Outcome rate_slope_check() {
  const ExperimentConfig c = preset("rates");
  const RateReport r = run_rate_experiment(c);
  keep("rates", rate_tables(r, "rates"));
  if (!r.fit) return {false, "slope unavailable"};
  bool beats_bayes = false;
  for (const auto& row : r.rows) beats_bayes |= row.mean_excess_labels < -2.0 * row.se_labels;
  const double s = r.fit->slope;
  return {s >= -1.0 && s <= -0.35 && !beats_bayes,
          "slope " + fmt("%.3f", s) + " +- " + fmt("%.3f", r.fit->slope_se) +
              " (window [-1, -0.35], theory -2/3)"};
}

Outcome floor_check() {
  const ExperimentConfig c = preset("floor");
  const RateReport r = run_floor_experiment(c);
  keep("floor", rate_tables(r, "floor"));
  if (!r.fit) return {false, "slope unavailable"};
  const RateRow& last = r.rows.back();
  const double s = r.fit->slope;
  const bool slope_ok = s >= -1.0 && s <= -0.35;
  const bool positive = last.mean_excess >= 3.0 * last.se;
  return {slope_ok && positive,
          "slope " + fmt("%.3f", s) + " +- " + fmt("%.3f", r.fit->slope_se) +
              ", excess at N=" + std::to_string(last.N) + " " + fmt("%.4g", last.mean_excess) +
              " = " + fmt("%.1f", last.se > 0 ? last.mean_excess / last.se : 0.0) +
              " SE, fixed-exponent floor check " + std::string(to_string(r.floor_verdict))};
}

ExperimentResult margin_run;

Outcome margin_check() {
  const ExperimentConfig c = preset("margin");
  margin_run = run_experiment(c);
  const Table& t = table_named(margin_run, "margin.csv");
  const Quantity span = quantity(t, "margin_ratio_span");
  const bool monotone = span.params.at("monotone");
  std::string freqs;
  for (const auto& q : quantities(t, "margin_frequency"))
    freqs += fmt(" %.4f", q.value);
  return {monotone && span.value < 3.0,
          "span " + fmt("%.3f", span.value) + " (limit 3), monotone " +
              (monotone ? "yes" : "no") + ", freq" + freqs};
}

Outcome zt_check() {
  const Table& t = table_named(margin_run, "margin.csv");
  const Quantity mean = quantity(t, "zt_mean");
  const Quantity var = quantity(t, "zt_variance");
  const Quantity hist = quantity(t, "zt_hist_max_density_doubled");
  const bool ok = mean.params.at("verdict") == "pass" && var.params.at("verdict") == "pass" &&
                  hist.params.at("verdict") == "pass";
  const double iso = var.params.at("isometry");
  const double rel = hist.params.at("relative_change");
  const std::string detail = "mean " + fmt("%.4f", mean.value) + ", var " +
                             fmt("%.4f", var.value) + " vs isometry " + fmt("%.4f", iso) +
                             ", hist change " + fmt("%.1f%%", 100 * rel) + " (limit 25%)";
  keep("margin", std::move(margin_run));
  return {ok, detail};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DRIFTCLASS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  int files = 0;
  std::string mismatches;
  for (const auto& [name, result] : library_runs) {
    const fs::path dir = kOut / "cli" / name;
    fs::remove_all(dir);
    const int rc = run_cli(name + " --config " + DRIFTCLASS_PRESETS + "/" + name +
                           ".conf --threads 1 --out " + dir.string());
    if (rc != 0 && rc != 1) return {false, name + ": CLI exit " + std::to_string(rc)};
    for (const auto& [file, table] : result.tables) {
      ++files;
      const std::string lib = slurp(kOut / "lib" / name / file);
      if (lib.empty() || lib != slurp(dir / file) || lib != to_csv(table))
        mismatches += " " + name + "/" + file;
    }
  }
  if (files == 0) return {false, "no library runs to compare"};
  return {mismatches.empty(),
          std::to_string(files) + " CSVs compared, threads " + std::to_string(kLibraryThreads) +
              " (library) vs 1 (CLI)" + (mismatches.empty() ? "" : ", differ:" + mismatches)};
}

}  // namespace

int main() {
  fs::remove_all(kOut);
  fs::create_directories(kOut);
  criterion(1, "kernel moments", 1, kernel_moments);
  criterion(2, "exact identities", 5, exact_identities);
  criterion(3, "density normalization", 30, normalization);
  criterion(4, "bias order", 120, bias_order);
  criterion(5, "tail bound dominance", 300, tail_dominance);
  criterion(6, "upper rate slope", 600, rate_slope_check);
  criterion(7, "floor consistency", 600, floor_check);
  criterion(8, "margin condition", 60, margin_check);
  criterion(9, "Z_T diagnostic", 60, zt_check);
  // criterion 10 reruns all five campaigns once more; budget is their sum
  criterion(10, "determinism", 1800, determinism);
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
