#ifndef WORMSIM_RNG_HPP
#define WORMSIM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace wormsim {

/// SplitMix64 used as a counter-based generator: draw k of a stream is
/// mix(key + k·φ), with φ the 64-bit golden-ratio increment. A stream key is
/// mix(seed), so the run driven by seed + r owns an independent stream and
/// ensembles do not depend on the order runs execute in.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed)) {}

  std::uint64_t next() {
    counter_ += kGolden;
    return mix(key_ + counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Exponential with the given rate (> 0).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace wormsim

#endif  // WORMSIM_RNG_HPP
