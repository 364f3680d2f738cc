// driftclass <experiment> --config <file> [--seed S] [--out DIR] [--threads K]
//
// Exit status: 0 when every verdict passes or is inconclusive, 1 when a
// verdict is falsified, 2 on usage or configuration errors.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "driftclass/config.hpp"
#include "driftclass/error.hpp"
#include "driftclass/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFalsified = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace driftclass;

  CLI::App app{"Monte Carlo laboratory for plug-in classification of diffusion paths"};
  std::string experiment;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 0;
  app.add_option("experiment", experiment, "rates | tails | margin | bias | floor")
      ->required()
      ->check(CLI::IsMember({"rates", "tails", "margin", "bias", "floor"}));
  app.add_option("--config", config_path, "key = value configuration file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "64-bit master seed (overrides config)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides config)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")
                          ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
    if (to_string(cfg.experiment) != experiment)
      fail(ErrorCode::Config, "command line asks for '" + experiment +
                                  "' but the config declares experiment = " +
                                  std::string(to_string(cfg.experiment)));
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.output_dir = out_dir;
    if (*threads_opt) cfg.threads = threads;
    validate(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "driftclass: %s\n", e.what());
    return kExitUsage;
  }

  try {
    const ExperimentResult result = run_experiment(cfg);
    write_result(result, cfg.output_dir);
    for (const auto& note : result.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
    for (const auto& [name, table] : result.tables)
      std::printf("wrote %s/%s (%zu rows)\n", cfg.output_dir.c_str(), name.c_str(),
                  table.rows.size());
    std::printf("%s: %s\n", experiment.c_str(), result.falsified ? "FALSIFIED" : "ok");
    return result.falsified ? kExitFalsified : kExitPass;
  } catch (const Error& e) {
    std::fprintf(stderr, "driftclass: %s\n", e.what());
    return e.code() == ErrorCode::Config ? kExitUsage : kExitFalsified;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "driftclass: %s\n", e.what());
    return kExitFalsified;
  }
}
