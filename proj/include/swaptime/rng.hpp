#pragma once

#include <cstdint>
#include <random>

namespace swaptime {

// Seed mixer used to derive independent streams from one user seed; the
// constants are the standard splitmix64 increments.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic uniform generator.  The mappings from raw 64-bit draws to
// doubles are written out explicitly so results are identical across
// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace swaptime
