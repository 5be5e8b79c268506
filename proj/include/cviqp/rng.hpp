#pragma once

// Seeded random source with pinned output semantics: every draw is derived
// from raw mt19937_64 words by fixed arithmetic, so a seed determines the
// exact byte stream independent of standard-library distribution internals.

#include <cmath>
#include <cstdint>
#include <random>

namespace cviqp {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; generates pairs, caches the partner.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] so log() is finite.
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in [0, bound) by multiply-shift on a 64-bit word.
  std::uint64_t uniform_index(std::uint64_t bound) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(gen_()) * static_cast<unsigned __int128>(bound);
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool coin() { return (gen_() & 1u) != 0; }

  std::uint64_t word() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace cviqp
