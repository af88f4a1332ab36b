// Seeded random streams for deterministic Monte-Carlo simulation.
//
// Every stochastic quantity in a run (truth profile, classical sensor
// noise, quantum shot noise) draws from its own RandomStream, keyed by
// (seed, stream id). Per-run seeds derive from (master seed, run index),
// so results are independent of execution order and worker count, and a
// given (config, master seed) pair always reproduces the same bytes.
//
// The generator is xoshiro256++ seeded through splitmix64, with the
// uniform->double and Box-Muller transforms spelled out here rather than
// taken from <random>, so sequences are identical across standard
// library implementations.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qfuse {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// Stream ids used by the simulation. One stream per independent noise
// source; a mode that does not consume a stream leaves it untouched, so
// e.g. classical noise is identical across fused and classical-only runs
// with the same seed.
inline constexpr std::uint64_t kStreamTruth = 0;
inline constexpr std::uint64_t kStreamClassical = 1;
inline constexpr std::uint64_t kStreamQuantum = 2;
inline constexpr std::uint64_t kStreamSingleShot = 3;

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += kGoldenGamma;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic seed for substream `index` of `base` (run of a master
// seed, or stream of a run seed).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t x = base;
  std::uint64_t h = splitmix64_next(x);
  x = h ^ (index * kGoldenGamma + 1);
  return splitmix64_next(x);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) { reseed(seed); }

  RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
    reseed(derive_seed(seed, stream_id));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Standard Box-Muller; the open-interval draw keeps log() finite.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : s_) word = splitmix64_next(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // xoshiro fixed point
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace qfuse
