#include "svycal/rng.hpp"

#include <cmath>

namespace svycal {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix(mix(seed + kGolden) ^ (stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() noexcept {
  counter_ += kGolden;
  return mix(key_ + counter_);
}

double CounterRng::next_uniform01() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::pair<double, double> CounterRng::next_normal_pair() noexcept {
  while (true) {
    const double u = 2.0 * next_uniform01() - 1.0;
    const double v = 2.0 * next_uniform01() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double m = std::sqrt(-2.0 * std::log(s) / s);
      return {u * m, v * m};
    }
  }
}

}  // namespace svycal
