#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "fptrack/hashing.hpp"

namespace fptrack {

/// AMS sketch for F_2: k signed counters c_j = sum_{h(i)=j} f_i g(i) with a
/// 4-wise sign hash g and a pairwise bucket hash h. The state is a linear
/// function of the frequency vector, so sketches with shared hashes merge by
/// counter addition and are order invariant.
///
/// The sum of squared counters is maintained incrementally in 128-bit
/// integer arithmetic, so estimate() is O(1) and exact.
class AmsSketch {
 public:
  /// Derives the g and h seeds from `seed` (see seed_role).
  AmsSketch(uint64_t universe, size_t buckets, uint64_t seed);

  /// Explicit hash families; sign_hash must have range 2 and bucket_hash
  /// range == its bucket count. Used by tests that force collisions.
  AmsSketch(HashFamily sign_hash, HashFamily bucket_hash);

  /// c_{h(item)} += delta * g(item).
  void update(uint64_t item, int64_t delta);

  /// sum_j c_j^2, the F_2 estimate.
  double estimate() const { return static_cast<double>(sum_sq_); }

  /// Component-wise counter addition. Throws std::invalid_argument unless
  /// the two sketches share bucket count, universe and hash families.
  void merge(const AmsSketch& other);

  size_t buckets() const { return counters_.size(); }
  uint64_t universe() const { return sign_.universe(); }
  std::span<const int64_t> counters() const { return counters_; }
  const HashFamily& sign_hash() const { return sign_; }
  const HashFamily& bucket_hash() const { return bucket_; }

  // Flat text dump for cross-process merge tests.
  void dump(std::ostream& out) const;
  static AmsSketch parse(std::istream& in);

  bool operator==(const AmsSketch& other) const {
    return sign_ == other.sign_ && bucket_ == other.bucket_ && counters_ == other.counters_;
  }

 private:
  void recompute_sum_sq();
  int32_t hash_pair(uint64_t item) const;

  HashFamily sign_;
  HashFamily bucket_;
  std::vector<int64_t> counters_;
  __int128 sum_sq_ = 0;

  // (bucket << 1 | sign bit) per item, built lazily for small universes so
  // hot update loops skip the polynomial evals; -1 = not yet computed.
  mutable std::vector<int32_t> pair_cache_;
};

/// Approximation ratio of the sketch defined by (g, h) at a real vector x:
/// sum_j (sum_{h(i)=j} g(i) x_i)^2 / sum_i x_i^2. Equals x^t H x / x^t x for
/// H_{ij} = g(i) g(j) [h(i) = h(j)]. Throws on the zero vector.
double ams_ratio(std::span<const double> x, const HashFamily& g, const HashFamily& h);

}  // namespace fptrack
