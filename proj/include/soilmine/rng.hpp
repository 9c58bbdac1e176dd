#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace soilmine {

/// SplitMix64 (Steele, Lea & Flood 2014): a 64-bit Weyl counter passed
/// through a fixed mixing function.
///
/// Every random decision in the library is drawn from this generator with the
/// derivations below, so the streams are reproducible bit for bit by any port:
///
///   next()         state += 0x9E3779B97F4A7C15, then the SplitMix64 finalizer
///   uniform01()    (next() >> 11) * 2^-53                      in [0, 1)
///   below(n)       high 64 bits of next() * n (128-bit product) in [0, n)
///   gaussian()     Box-Muller cosine branch, u1 = 1 - uniform01(), u2 = uniform01()
///
/// std::shuffle and the <random> distributions are deliberately not used
/// because their output is implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double gaussian() noexcept {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Fisher-Yates, walking from the back.
  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace soilmine
