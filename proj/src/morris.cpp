#include "fptrack/morris.hpp"

#include <cmath>
#include <stdexcept>

namespace fptrack {

MorrisCounter::MorrisCounter(uint64_t seed, double base)
    : base_(base), threshold_(1.0), rng_(seed) {
  if (!(base > 1.0)) throw std::invalid_argument("counter base must exceed 1");
}

void MorrisCounter::increment() {
  if (rng_.uniform01() < threshold_) {
    ++x_;
    threshold_ /= base_;
  }
}

double MorrisCounter::estimate() const {
  return (std::pow(base_, static_cast<double>(x_)) - 1.0) / (base_ - 1.0);
}

}  // namespace fptrack
