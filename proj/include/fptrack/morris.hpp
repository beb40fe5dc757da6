#pragma once

#include <cstdint>

#include "fptrack/common.hpp"

namespace fptrack {

/// Morris probabilistic counter: a register X incremented with probability
/// base^-X, estimating the event count as (base^X - 1) / (base - 1). The
/// register stays near log_base(count), i.e. O(log log count) bits of state.
class MorrisCounter {
 public:
  explicit MorrisCounter(uint64_t seed, double base = 2.0);

  void increment();

  /// Unbiased count estimate (base^X - 1) / (base - 1).
  double estimate() const;

  uint32_t exponent() const { return x_; }
  double base() const { return base_; }

 private:
  double base_;
  double threshold_;  // base^-X, kept in step with x_
  uint32_t x_ = 0;
  Rng rng_;
};

}  // namespace fptrack
