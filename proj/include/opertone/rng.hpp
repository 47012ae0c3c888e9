#pragma once
// Seeded random streams. The generator is the standard mt19937_64, so the
// raw draw sequence is identical on every conforming platform; all floating
// draws go through the fixed u64 -> [0,1) mapping below rather than
// std::uniform_real_distribution (whose output is implementation-defined).
//
// Reference draws, mt19937_64 seeded with 42, first four outputs:
//   13930160852258120406, 11788048577503494824,
//   13874630024467741450, 2513787319205155662
// (asserted in the test suite; campaigns depend on this stream).

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace opertone {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Per-trial stream seed: trial t of a campaign seeded s draws from
/// mix_seed(s, t), so trials are schedule-independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed + 0x9E3779B97F4A7C15ull * (trial + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double log_uniform(double a, double b) {
    return std::exp(uniform(std::log(a), std::log(b)));
  }

  /// Standard normal via Box-Muller on the fixed uniform mapping.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  /// Standard complex Gaussian, E|z|^2 = 1.
  std::complex<double> cgauss() {
    const double re = normal();
    const double im = normal();
    return std::complex<double>(re, im) / std::sqrt(2.0);
  }

 private:
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace opertone
