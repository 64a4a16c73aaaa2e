#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bioquake/core.hpp"

namespace bioquake {

/// xoshiro256** (Blackman & Vigna) seeded through SplitMix64. The output
/// sequence is fixed by the algorithm, so results agree across platforms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent sub-stream `index` of `seed`: SplitMix64 is seeded with the
  /// pair hashed together, so stream k never depends on streams < k.
  static Rng stream(std::uint64_t seed, std::uint64_t index);
  /// Raw generator state, for known-answer tests.
  static Rng from_state(const std::array<std::uint64_t, 4>& state);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next(); }

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound), Lemire's multiply-shift with rejection.
  std::uint64_t bounded(std::uint64_t bound);
  /// Standard normal, Marsaglia polar method.
  double normal();
  double normal(double mean, double std) { return mean + std * normal(); }
  /// Binomial(n, p) by inversion, searching outward from the mode.
  Count binomial(Count n, double p);

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Draws k of n indices without replacement (partial Fisher-Yates). `scratch`
/// must hold the identity permutation of size n on entry and holds it again
/// on return, so one buffer can serve many draws in any order.
void sample_without_replacement(std::vector<std::uint32_t>& scratch, std::size_t k, Rng& rng,
                                std::vector<std::uint32_t>& out);

}  // namespace bioquake
