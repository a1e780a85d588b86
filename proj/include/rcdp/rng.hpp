#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rcdp {

// Independent random streams of one simulation run. Each stream is keyed by
// (seed, stream, substream) so draws in one stream never shift another.
enum class Stream : std::uint64_t {
  Theta = 1,        // ground-truth parameter
  Mapping = 2,      // linear post-serving map
  Context = 3,      // per-round contexts and post-serving noise; substream = round
  Outcome = 4,      // preference coin; substream = round
  Delay = 5,        // stochastic delays; substream = round
  Policy = 6,       // policy randomization (COLSTIM perturbations)
  Approximator = 7, // feature draws and network init
  Instance = 8,     // hard-instance sign patterns and action sets
};

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output i is splitmix64_mix(key + (i+1) * gamma).
// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  CounterRng() = default;
  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0)
      : key_(splitmix64_mix(splitmix64_mix(splitmix64_mix(seed) ^ static_cast<std::uint64_t>(stream)) ^
                            substream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64_mix(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1) with 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (cosine branch only, stateless).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Standard Gumbel(0, 1).
  double gumbel() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(-std::log(u));
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace rcdp
