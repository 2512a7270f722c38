#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace flocksim {

/// Deterministic 64-bit generator used for every random draw the library
/// makes.  The algorithm is SplitMix64 (Steele, Lea, Vigna), chosen because
/// it is trivial to reproduce in any language from the constants below:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Uniform doubles in [0, 1) take the top 53 bits: (u64 >> 11) * 2^-53.
/// Reports produced from the same seeds are therefore byte-identical across
/// platforms and worker counts.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("next_in: lo > hi");
    return lo + (hi - lo) * next_unit();
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: empty range");
    // Desk-scale ranges; modulo bias is negligible for n << 2^64 and keeps
    // the draw reproducible from the raw 64-bit stream.
    return next_u64() % n;
  }

  /// Inverse-CDF draw from a categorical distribution given cumulative
  /// weights whose last entry is 1.  Returns the 0-based category index.
  int next_category(const std::vector<double>& cdf) {
    if (cdf.empty()) throw std::invalid_argument("next_category: empty table");
    const double u = next_unit();
    for (std::size_t k = 0; k + 1 < cdf.size(); ++k) {
      if (u < cdf[k]) return static_cast<int>(k);
    }
    return static_cast<int>(cdf.size()) - 1;
  }

private:
  std::uint64_t state_;
};

/// Stateless mix of (seed, index) -> child seed, used to derive per-run and
/// per-purpose seeds.  One SplitMix64 step from `seed + index * golden ratio`.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed + index * 0x9E3779B97F4A7C15ull);
  return g.next_u64();
}

}  // namespace flocksim
