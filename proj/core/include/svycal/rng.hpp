#pragma once

#include <cstdint>
#include <utility>

namespace svycal {

// Counter-based deterministic generator (SplitMix64 construction): the k-th
// output is a pure avalanche of key + k*phi, so streams keyed by
// (seed, stream) can be replayed or partitioned without shared state.
// Standard normals come from the Marsaglia polar transform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, 1) with 53 random mantissa bits.
  double next_uniform01() noexcept;

  // A pair of independent standard normal deviates.
  std::pair<double, double> next_normal_pair() noexcept;

  static std::uint64_t mix(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace svycal
