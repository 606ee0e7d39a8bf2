#pragma once

// Reproducible random numbers.  Every trajectory owns an independent
// substream derived from (master seed, stream index) with a splitmix64
// scrambler, so results do not depend on how trajectories are distributed
// over threads and adding trajectories never perturbs existing ones.
//
// Variate generation is spelled out explicitly (no std::*_distribution);
// those helpers are unspecified across standard libraries and would break
// bit-level reproducibility of the manifests.

#include <cmath>
#include <cstdint>
#include <random>

namespace qwalk {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed for substream `stream` of a given master seed.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t stream) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64_next(s);
  s = a ^ (stream * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
  std::uint64_t out = splitmix64_next(s);
  return out ^ splitmix64_next(s);
}

class Rng {
public:
  // Recorded in run manifests; bump if the generation scheme ever changes.
  static constexpr const char* kAlgorithm = "mt19937_64+splitmix64-substreams+box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master_seed, std::uint64_t stream)
      : engine_(substream_seed(master_seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return 1.0 - uniform(); }

  // Standard normal via Box-Muller.  The spare variate is deliberately not
  // cached: one call consumes exactly two engine draws, which keeps stream
  // alignment easy to reason about.
  double gaussian() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Exponential waiting time with the given rate (> 0).
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

private:
  std::mt19937_64 engine_;
};

}
