#pragma once

#include <cstdint>
#include <limits>

namespace causalpre {

/// SplitMix64. Small enough to instantiate once per row, which lets every
/// row own an independent substream and keeps output identical regardless
/// of how rows are split across threads.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

/// Seed for substream (stream, index) of a run seeded with `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  SplitMix64 mix(seed ^ 0x6A09E667F3BCC909ull);
  std::uint64_t h = mix();
  SplitMix64 a(h ^ (stream * 0x9E3779B97F4A7C15ull));
  h = a();
  SplitMix64 b(h ^ (index * 0xD1B54A32D192ED03ull));
  return b();
}

}  // namespace causalpre
