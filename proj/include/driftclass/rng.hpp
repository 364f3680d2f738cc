#pragma once

#include <cstdint>
#include <random>

namespace driftclass {

/// Splittable seed: every Monte Carlo replicate, path, or probe derives its
/// own child seed from a fixed key path, so results never depend on how work
/// is scheduled across threads.
class SeedSequence {
 public:
  explicit SeedSequence(std::uint64_t seed) : state_(seed) {}

  SeedSequence child(std::uint64_t key) const;
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  explicit Rng(const SeedSequence& seq) : Rng(seq.value()) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace driftclass
