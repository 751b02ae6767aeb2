#pragma once

#include <cstdint>
#include <random>

namespace tomolab {

// Deterministic random source. mt19937_64 output is fixed by the standard,
// and the uniform mapping below avoids std::uniform_real_distribution
// (whose stream is implementation defined), so a given seed reproduces the
// same draws on every platform.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : engine_(seed), seed_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1), 53 mantissa bits
  double uniform_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform_double(); }

  // child stream for a salted sub-task; salts are hashed in order
  SeededRng derive(std::initializer_list<uint64_t> salts) const {
    uint64_t h = seed_;
    for (uint64_t s : salts) h = mix(h ^ (s + 0x9e3779b97f4a7c15ULL));
    return SeededRng(h);
  }

  // splitmix64 finalizer
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  uint64_t seed_;
};

}  // namespace tomolab
