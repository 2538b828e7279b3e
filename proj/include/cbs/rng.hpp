#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cbs {

/// One splitmix64 step. Used for seed mixing and stream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random source: a std::mt19937_64 engine (fully specified by
/// the standard, so identical on every platform) combined with hand-rolled
/// distributions. Standard-library distributions are implementation-defined
/// and would break cross-platform reproducibility of seeded experiments.
///
/// Streams: spawn(i) derives an independent child generator by mixing the
/// parent seed with the stream index through splitmix64. The pipeline uses
/// one stream for hypothesis sampling and one for clustering, so results do
/// not depend on how many draws each phase consumes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    engine_.seed(splitmix64_next(s));
  }

  /// Independent child stream. Children with distinct indices (and children
  /// of distinct parents) do not overlap in any practical sense.
  Rng spawn(std::uint64_t stream) const {
    std::uint64_t s = seed_ ^ (0x5851f42d4c957f2dULL * (stream + 1));
    return Rng(splitmix64_next(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t uniform_u64(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int uniform_int(int n) { return static_cast<int>(uniform_u64(static_cast<std::uint64_t>(n))); }

  /// Standard normal variate (Marsaglia polar method, no cached state).
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace cbs
