#include "driftclass/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "driftclass/error.hpp"

namespace driftclass {

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Rates: return "rates";
    case Experiment::Tails: return "tails";
    case Experiment::Margin: return "margin";
    case Experiment::Bias: return "bias";
    case Experiment::Floor: return "floor";
  }
  return "unknown";
}

namespace {

struct BadValue {
  std::string message;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw BadValue{"empty list element"};
    out.push_back(item);
  }
  if (out.empty()) throw BadValue{"empty list"};
  return out;
}

double as_real(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw BadValue{"expected a real number, got '" + v + "'"};
  return out;
}

long as_integer(const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw BadValue{"expected an integer, got '" + v + "'"};
  return out;
}

int as_int(const std::string& v) {
  const long l = as_integer(v);
  if (l < -2147483647L || l > 2147483647L) throw BadValue{"integer out of range"};
  return static_cast<int>(l);
}

DriftKind as_drift_kind(const std::string& v) {
  if (v == "zero") return DriftKind::Zero;
  if (v == "bump") return DriftKind::Bump;
  if (v == "hypercube") return DriftKind::Hypercube;
  throw BadValue{"expected zero|bump|hypercube, got '" + v + "'"};
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct Key {
  std::string name;
  Setter set;
};

void add_drift_keys(std::vector<Key>& keys, const std::string& prefix,
                    DriftConfig ExperimentConfig::*member) {
  keys.push_back({prefix + ".kind", [member](ExperimentConfig& c, const std::string& v) {
                    (c.*member).kind = as_drift_kind(v);
                  }});
  keys.push_back({prefix + ".lo", [member](ExperimentConfig& c, const std::string& v) {
                    (c.*member).support.lo = as_real(v);
                  }});
  keys.push_back({prefix + ".hi", [member](ExperimentConfig& c, const std::string& v) {
                    (c.*member).support.hi = as_real(v);
                  }});
  keys.push_back({prefix + ".amplitude", [member](ExperimentConfig& c, const std::string& v) {
                    (c.*member).amplitude = as_real(v);
                  }});
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back({"experiment", [](ExperimentConfig& c, const std::string& v) {
                   if (v == "rates") c.experiment = Experiment::Rates;
                   else if (v == "tails") c.experiment = Experiment::Tails;
                   else if (v == "margin") c.experiment = Experiment::Margin;
                   else if (v == "bias") c.experiment = Experiment::Bias;
                   else if (v == "floor") c.experiment = Experiment::Floor;
                   else throw BadValue{"expected rates|tails|margin|bias|floor, got '" + v + "'"};
                 }});
    k.push_back({"seed", [](ExperimentConfig& c, const std::string& v) {
                   std::uint64_t out = 0;
                   const auto* end = v.data() + v.size();
                   const auto [ptr, ec] = std::from_chars(v.data(), end, out);
                   if (ec != std::errc() || ptr != end)
                     throw BadValue{"expected an unsigned 64-bit integer, got '" + v + "'"};
                   c.seed = out;
                 }});
    k.push_back({"output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }});
    k.push_back({"threads", [](ExperimentConfig& c, const std::string& v) { c.threads = as_int(v); }});
    k.push_back({"p1", [](ExperimentConfig& c, const std::string& v) { c.p1 = as_real(v); }});
    k.push_back({"x0", [](ExperimentConfig& c, const std::string& v) { c.x0 = as_real(v); }});
    k.push_back({"T", [](ExperimentConfig& c, const std::string& v) { c.T = as_real(v); }});
    k.push_back({"t0", [](ExperimentConfig& c, const std::string& v) { c.t0 = as_real(v); }});
    k.push_back({"n_steps", [](ExperimentConfig& c, const std::string& v) { c.n_steps = as_int(v); }});
    add_drift_keys(k, "drift0", &ExperimentConfig::drift0);
    add_drift_keys(k, "drift1", &ExperimentConfig::drift1);
    k.push_back({"hypercube.kappa", [](ExperimentConfig& c, const std::string& v) { c.hypercube.kappa = as_real(v); }});
    k.push_back({"hypercube.R", [](ExperimentConfig& c, const std::string& v) { c.hypercube.holder_const = as_real(v); }});
    k.push_back({"hypercube.a", [](ExperimentConfig& c, const std::string& v) { c.hypercube.kernel_amplitude = as_real(v); }});
    k.push_back({"hypercube.theta", [](ExperimentConfig& c, const std::string& v) {
                   if (v == "random") c.hypercube.theta_mode = ThetaMode::Random;
                   else if (v == "zero") c.hypercube.theta_mode = ThetaMode::Zero;
                   else if (v == "ones") c.hypercube.theta_mode = ThetaMode::Ones;
                   else {
                     c.hypercube.theta_mode = ThetaMode::Fixed;
                     c.hypercube.theta.clear();
                     for (const auto& t : split_list(v)) c.hypercube.theta.push_back(as_real(t));
                   }
                 }});
    k.push_back({"beta", [](ExperimentConfig& c, const std::string& v) { c.beta = as_real(v); }});
    k.push_back({"gamma", [](ExperimentConfig& c, const std::string& v) { c.gamma = as_int(v); }});
    k.push_back({"m", [](ExperimentConfig& c, const std::string& v) {
                   if (v == "pilot") c.m.reset();
                   else c.m = as_real(v);
                 }});
    k.push_back({"pilot.paths", [](ExperimentConfig& c, const std::string& v) { c.pilot_paths = as_int(v); }});
    k.push_back({"pilot.bin", [](ExperimentConfig& c, const std::string& v) { c.pilot_bin = as_real(v); }});
    k.push_back({"grid", [](ExperimentConfig& c, const std::string& v) { c.grid_points = as_int(v); }});
    k.push_back({"grid.lo", [](ExperimentConfig& c, const std::string& v) {
                   if (!c.grid) c.grid = Interval{0.0, 0.0};
                   c.grid->lo = as_real(v);
                 }});
    k.push_back({"grid.hi", [](ExperimentConfig& c, const std::string& v) {
                   if (!c.grid) c.grid = Interval{0.0, 0.0};
                   c.grid->hi = as_real(v);
                 }});
    k.push_back({"N", [](ExperimentConfig& c, const std::string& v) {
                   c.N.clear();
                   for (const auto& t : split_list(v)) c.N.push_back(as_integer(t));
                 }});
    k.push_back({"replicates", [](ExperimentConfig& c, const std::string& v) { c.replicates = as_int(v); }});
    k.push_back({"n_test", [](ExperimentConfig& c, const std::string& v) { c.n_test = as_integer(v); }});
    k.push_back({"excess", [](ExperimentConfig& c, const std::string& v) {
                   if (v == "conditional") c.excess = ExcessEstimator::Conditional;
                   else if (v == "labels") c.excess = ExcessEstimator::Labels;
                   else throw BadValue{"expected conditional|labels, got '" + v + "'"};
                 }});
    k.push_back({"slope.lo", [](ExperimentConfig& c, const std::string& v) { c.slope_lo = as_real(v); }});
    k.push_back({"slope.hi", [](ExperimentConfig& c, const std::string& v) { c.slope_hi = as_real(v); }});
    k.push_back({"tails.class", [](ExperimentConfig& c, const std::string& v) { c.tails_class = as_int(v); }});
    k.push_back({"tails.delta", [](ExperimentConfig& c, const std::string& v) {
                   c.tails_delta.clear();
                   c.tails_delta_rule = false;
                   for (const auto& t : split_list(v)) {
                     if (t == "rule") c.tails_delta_rule = true;
                     else c.tails_delta.push_back(as_real(t));
                   }
                 }});
    k.push_back({"margin.eps", [](ExperimentConfig& c, const std::string& v) {
                   c.margin_eps.clear();
                   for (const auto& t : split_list(v)) c.margin_eps.push_back(as_real(t));
                 }});
    k.push_back({"margin.paths", [](ExperimentConfig& c, const std::string& v) { c.margin_paths = as_int(v); }});
    k.push_back({"margin.span", [](ExperimentConfig& c, const std::string& v) { c.margin_span = as_real(v); }});
    k.push_back({"zt.bins", [](ExperimentConfig& c, const std::string& v) { c.zt_bins = as_int(v); }});
    k.push_back({"bias.x", [](ExperimentConfig& c, const std::string& v) { c.bias_x = as_real(v); }});
    k.push_back({"bias.h", [](ExperimentConfig& c, const std::string& v) { c.bias_h = as_real(v); }});
    k.push_back({"bias.paths", [](ExperimentConfig& c, const std::string& v) { c.bias_paths = as_int(v); }});
    k.push_back({"bias.class", [](ExperimentConfig& c, const std::string& v) { c.bias_class = as_int(v); }});
    k.push_back({"bias.reference_paths", [](ExperimentConfig& c, const std::string& v) { c.bias_reference_paths = as_int(v); }});
    k.push_back({"bias.reference_bin", [](ExperimentConfig& c, const std::string& v) { c.bias_reference_bin = as_real(v); }});
    k.push_back({"bias.ratio_lo", [](ExperimentConfig& c, const std::string& v) { c.bias_ratio_lo = as_real(v); }});
    k.push_back({"bias.ratio_hi", [](ExperimentConfig& c, const std::string& v) { c.bias_ratio_hi = as_real(v); }});
    return k;
  }();
  return keys;
}

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCode::Config, msg); }

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return names;
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, const Key*> lookup;
  for (const auto& k : key_table()) lookup[k.name] = &k;

  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string::npos) config_error(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) config_error(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) config_error(where + ": duplicate key '" + key + "'");
    if (value.empty()) config_error(where + ": key '" + key + "' has no value");
    try {
      it->second->set(cfg, value);
    } catch (const BadValue& bad) {
      config_error(where + ": key '" + key + "': " + bad.message);
    }
  }
  if (!seen.count("experiment")) config_error("missing required key 'experiment'");
  if (!seen.count("t0")) cfg.t0 = 0.1 * cfg.T;
  if (!seen.count("gamma")) cfg.gamma = std::max(1, 2 * static_cast<int>(std::floor(cfg.beta)));
  if (!seen.count("bias.x")) cfg.bias_x = cfg.x0;
  if (cfg.grid && (!seen.count("grid.lo") || !seen.count("grid.hi")))
    config_error("grid.lo and grid.hi must be given together");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Config, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) fail(ErrorCode::Config, "key '" + key + "': " + msg);
  };
  require(c.p1 > 0.0 && c.p1 < 1.0, "p1", "must lie in (0, 1)");
  require(c.T > 0.0, "T", "must be > 0");
  require(c.t0 > 0.0 && c.t0 < c.T, "t0", "must lie in (0, T)");
  require(c.n_steps >= 1, "n_steps", "must be >= 1");
  require(c.beta >= 1.0, "beta", "must be >= 1");
  require(c.gamma >= 1, "gamma", "must be >= 1");
  require(!c.m || *c.m > 0.0, "m", "must be > 0 or 'pilot'");
  require(c.pilot_paths >= 2, "pilot.paths", "must be >= 2");
  require(c.pilot_bin > 0.0, "pilot.bin", "must be > 0");
  require(c.grid_points >= 2, "grid", "must be >= 2");
  if (c.grid) require(c.grid->lo < c.grid->hi, "grid.lo", "must be < grid.hi");
  require(!c.N.empty(), "N", "must not be empty");
  for (std::size_t i = 0; i < c.N.size(); ++i) {
    require(c.N[i] >= 2, "N", "entries must be >= 2");
    if (i) require(c.N[i] > c.N[i - 1], "N", "must be strictly increasing");
  }
  require(c.replicates >= 1, "replicates", "must be >= 1");
  require(c.n_test >= 1, "n_test", "must be >= 1");
  require(c.slope_lo < c.slope_hi, "slope.lo", "must be < slope.hi");
  for (const auto* d : {&c.drift0, &c.drift1}) {
    const std::string name = d == &c.drift0 ? "drift0" : "drift1";
    require(d->support.lo < d->support.hi, name + ".lo", "must be < " + name + ".hi");
    if (d->kind == DriftKind::Bump) require(d->amplitude != 0.0, name + ".amplitude", "must be non-zero");
  }
  require(c.drift0.kind != DriftKind::Hypercube, "drift0.kind",
          "the hypercube family is only available for class 1 (b0 = 0)");
  if (c.drift1.kind == DriftKind::Hypercube) {
    require(c.drift0.kind == DriftKind::Zero, "drift0.kind", "must be zero with a hypercube drift1");
    require(c.hypercube.kappa != 0.0, "hypercube.kappa", "must be non-zero");
    require(c.hypercube.holder_const > 0.0, "hypercube.R", "must be > 0");
    require(c.hypercube.kernel_amplitude > 0.0, "hypercube.a", "must be > 0");
  }
  if (c.experiment == Experiment::Floor) {
    require(c.drift1.kind == DriftKind::Hypercube, "drift1.kind", "floor experiment needs hypercube");
    require(c.p1 == 0.5, "p1", "floor experiment fixes p = (1/2, 1/2)");
  }
  if (c.experiment == Experiment::Tails) {
    require(c.tails_class == 0 || c.tails_class == 1, "tails.class", "must be 0 or 1");
    require(c.replicates >= 50, "replicates", "tail probabilities need >= 50 replicates");
    for (double d : c.tails_delta) require(d >= 0.0, "tails.delta", "entries must be >= 0");
  }
  for (double e : c.margin_eps)
    require(e > 0.0 && e < 0.125, "margin.eps", "entries must lie in (0, 1/8)");
  require(c.margin_paths >= 2, "margin.paths", "must be >= 2");
  require(c.zt_bins >= 1, "zt.bins", "must be >= 1");
  require(c.bias_h > 0.0, "bias.h", "must be > 0");
  require(c.bias_paths >= 2, "bias.paths", "must be >= 2");
  require(c.bias_class == 0 || c.bias_class == 1, "bias.class", "must be 0 or 1");
  require(c.bias_reference_paths >= 2, "bias.reference_paths", "must be >= 2");
  require(c.bias_reference_bin > 0.0, "bias.reference_bin", "must be > 0");
  require(c.bias_ratio_lo < c.bias_ratio_hi, "bias.ratio_lo", "must be < bias.ratio_hi");
}

}  // namespace driftclass
