#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fptrack/hashing.hpp"
#include "fptrack/stream.hpp"

namespace fptrack::test {

/// Independent ground-truth moment: recounts the event list from scratch
/// with a plain ordered map, no shared code with FrequencyVector.
inline double brute_force_moment(std::span<const StreamEvent> events, size_t prefix,
                                 double p) {
  std::map<uint64_t, long long> counts;
  for (size_t i = 0; i < std::min(prefix, events.size()); ++i) {
    const StreamEvent& e = events[i];
    counts[e.item] += static_cast<long long>(e.delta) * static_cast<long long>(e.repeat);
  }
  double sum = 0.0;
  for (const auto& [item, c] : counts) {
    if (c == 0) continue;
    const double a = std::abs(static_cast<double>(c));
    sum += p == 2.0 ? a * a : std::pow(a, p);
  }
  return sum;
}

/// Two-sample Kolmogorov-Smirnov distance; sorts its inputs.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

/// Dense-matrix oracle for the approximation ratio: builds
/// H_{ij} = g(i) g(j) [h(i) = h(j)] explicitly and evaluates x^t H x / x^t x.
inline double dense_ratio_oracle(std::span<const double> x, const HashFamily& g,
                                 const HashFamily& h) {
  const size_t d = x.size();
  double quad = 0.0, xtx = 0.0;
  for (size_t i = 0; i < d; ++i) {
    xtx += x[i] * x[i];
    for (size_t j = 0; j < d; ++j) {
      if (h.bucket(i) != h.bucket(j)) continue;
      quad += g.sign(i) * g.sign(j) * x[i] * x[j];
    }
  }
  return quad / xtx;
}

inline StreamEvent ev(uint64_t item, int32_t delta = +1, uint64_t repeat = 1) {
  return {item, delta, repeat};
}

}  // namespace fptrack::test
