#pragma once

#include <cstdint>

namespace aoifb {

/// Counter-based generator: output k of a stream is a fixed bijective mix
/// of (key + k * gamma). Streams are keyed by (seed, stream index), so
/// replication r draws the same numbers however many replications run.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static CounterRng stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return CounterRng(mix(seed ^ mix(index + kGamma)));
  }

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aoifb
