#pragma once

#include <cstdint>

namespace ahnag {

/// Counter-based generator: the i-th draw is splitmix64(seed + (i+1) * golden),
/// so a stream is a pure function of (seed, position) and identical on every
/// platform. Normal draws use Box-Muller on pairs of uniforms.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ahnag
