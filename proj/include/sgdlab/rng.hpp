#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sgdlab {

/// Counter-based generator. Output i of a stream with key k is
/// mix64(k + (i+1) * 0x9E3779B97F4A7C15), where mix64 is the SplitMix64
/// finalizer, so any draw is a pure function of (key, counter) and streams
/// split by deriving new keys. Normals use Box-Muller on 53-bit uniforms and
/// consume both outputs of each pair.
class CounterRng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  /// Stream for run `index` under `master_seed`.
  static CounterRng substream(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return CounterRng(mix64(master_seed ^ mix64(index + kGolden)));
  }

  static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sgdlab
