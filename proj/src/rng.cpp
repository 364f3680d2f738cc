#include "driftclass/rng.hpp"

#include <cstdlib>
#include <string>

#include "driftclass/parallel.hpp"

namespace driftclass {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedSequence SeedSequence::child(std::uint64_t key) const {
  return SeedSequence(splitmix64(state_ ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
}

int default_threads() {
  if (const char* env = std::getenv("DRIFTCLASS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace driftclass
