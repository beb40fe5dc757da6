#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "fptrack/stable.hpp"

namespace fptrack {

/// Linear sketch y = A f with independent standard p-stable entries
/// A_{j,i}, maintained over `rows` accumulators. By stability, each y_j is
/// distributed as ||f||_p times a standard p-stable variate, so
///
///   norm_estimate = s-quantile of |y_j| / scale(p, s)
///   estimate      = norm_estimate^p        (the moment F_p = ||f||_p^p)
///
/// A caller that wants moment accuracy eps should budget norm accuracy
/// eps/p, the first-order inflation of (1 + d)^p.
///
/// Matrix entries are regenerated deterministically from
/// (seed, row, item) instead of storing rows x universe reals; touched
/// items cache their column, so memory is O(rows * F_0).
class StableSketch {
 public:
  StableSketch(uint64_t universe, size_t rows, double p, double scale,
               uint64_t seed, double s_quantile = 0.5);

  /// y_j += delta * A_{j,item} for every row j.
  void update(uint64_t item, int64_t delta);

  /// Moment estimate norm_estimate()^p; 0 for an untouched sketch.
  double estimate() const;

  /// Quantile of |y_j| divided by the scale constant, estimating ||f||_p.
  double norm_estimate() const;

  /// A_{row,item}; the dense oracle in tests builds the matrix from this.
  double entry(size_t row, uint64_t item) const;

  /// Component-wise accumulator addition; throws std::invalid_argument
  /// unless (universe, rows, p, seed, scale, s) all match.
  void merge(const StableSketch& other);

  size_t rows() const { return accumulators_.size(); }
  uint64_t universe() const { return universe_; }
  double p() const { return sampler_.p(); }
  double scale() const { return scale_; }
  double s_quantile() const { return s_; }
  uint64_t seed() const { return seed_; }
  std::span<const double> accumulators() const { return accumulators_; }

  void dump(std::ostream& out) const;
  static StableSketch parse(std::istream& in);

 private:
  const std::vector<double>& column(uint64_t item) const;

  uint64_t universe_;
  uint64_t seed_;
  double scale_;
  double s_;
  StableSampler sampler_;
  std::vector<double> accumulators_;

  // Column cache: flat for small universes, hashed otherwise.
  mutable std::vector<std::vector<double>> flat_cache_;
  mutable std::unordered_map<uint64_t, std::vector<double>> map_cache_;
  mutable std::vector<double> scratch_;
};

}  // namespace fptrack
