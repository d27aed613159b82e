#pragma once

#include <cstdint>
#include <random>

namespace simbf {

// splitmix64 step; used to derive well-separated sub-stream seeds.
inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Owned random stream. Doubles are built from the raw 64-bit output so that
// sequences do not depend on the standard library's distribution internals.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

  RandomStream spawn(uint64_t salt) { return RandomStream(derive_seed(engine_(), salt)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace simbf
