#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fptrack {

/// SplitMix64 finalizer. All project randomness is derived from explicit
/// 64-bit seeds through this mixer so that every run is reproducible and
/// trials/copies can be re-run in isolation.
constexpr uint64_t avalanche64(uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr uint64_t kGolden64 = 0x9e3779b97f4a7c15ULL;

/// Combines a seed with a stream/instance id. Not commutative.
constexpr uint64_t mix64(uint64_t a, uint64_t b) noexcept {
  return avalanche64(a + kGolden64 + avalanche64(b + kGolden64));
}

constexpr uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) noexcept {
  return mix64(mix64(a, b), c);
}

// Fixed role tags for the seed tree: every derived seed is
// mix64(parent_seed, role[, index]) so no two consumers share a stream.
namespace seed_role {
inline constexpr uint64_t kSignHash = 0x01;
inline constexpr uint64_t kBucketHash = 0x02;
inline constexpr uint64_t kStableRows = 0x03;
inline constexpr uint64_t kCopy = 0x04;
inline constexpr uint64_t kStream = 0x10;
inline constexpr uint64_t kTrial = 0x11;
inline constexpr uint64_t kBallSample = 0x20;
inline constexpr uint64_t kScaleTable = 0x40;
}  // namespace seed_role

/// Counter-free SplitMix64 generator.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() noexcept {
    state_ += kGolden64;
    return avalanche64(state_);
  }

  /// Uniform double in the open interval (0, 1).
  double uniform01() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) via rejection.
  uint64_t below(uint64_t bound) noexcept {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

 private:
  uint64_t state_;
};

/// Sorted-order index used for every quantile in the project: the lower
/// quantile floor(s * (n - 1)), so estimates are always actual sample
/// values. For s = 0.5 this is the lower median floor((n - 1) / 2).
inline size_t lower_quantile_index(size_t n, double s) noexcept {
  if (n == 0) return 0;
  const double idx = std::floor(s * static_cast<double>(n - 1));
  if (idx <= 0) return 0;
  if (idx >= static_cast<double>(n - 1)) return n - 1;
  return static_cast<size_t>(idx);
}

/// In-place selection of the lower s-quantile of `values`.
double lower_quantile(std::vector<double>& values, double s);

/// Lower median, the tie rule used by every median in the project.
inline double lower_median(std::vector<double>& values) {
  return lower_quantile(values, 0.5);
}

/// Three-sigma binomial half width used in all aggregate reports.
inline double binomial_half_width(double fraction, uint64_t trials) noexcept {
  if (trials == 0) return 0.0;
  return 3.0 * std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(trials));
}

/// Shortest round-trippable decimal form of a double; used by every CSV
/// and table writer so that re-runs are byte identical.
std::string format_double(double v);

}  // namespace fptrack
