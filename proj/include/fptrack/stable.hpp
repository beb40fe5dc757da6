#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace fptrack {

/// Standard symmetric p-stable sampler, parameterized by the characteristic
/// function exp(-|t|^p): p = 1 is the standard Cauchy and p = 2 a Gaussian
/// with variance 2. Draws are addressed by index, not generator state, so
/// sketch matrix entries can be regenerated on demand and in parallel.
class StableSampler {
 public:
  StableSampler(double p, uint64_t seed);

  /// One variate via the Chambers-Mallows-Stuck transform of a uniform angle
  /// in (-pi/2, pi/2) and a unit exponential. Pure function of
  /// (seed, draw_index).
  double sample(uint64_t draw_index) const;

  double p() const { return p_; }
  uint64_t seed() const { return seed_; }

 private:
  double p_;
  uint64_t seed_;
};

/// Cache of quantile scale constants: scale(p, s) is the s-quantile of |X|
/// for standard p-stable X. The p-stable sketch divides its sample quantile
/// by this constant to turn it into a norm estimate. Entries are Monte-Carlo
/// with a fixed internal seed (so recomputation reproduces the file), except
/// the analytic entry scale(1, 0.5) = 1.
class ScaleTable {
 public:
  static constexpr uint64_t kDefaultSamples = 10'000'000;

  struct Entry {
    double scale = 0.0;
    uint64_t samples = 0;  // 0 marks an analytic entry
  };

  /// Returns the cached constant, computing and inserting it when absent.
  double get_or_compute(double p, double s, uint64_t samples = kDefaultSamples);

  /// The Monte-Carlo (or analytic) quantile itself, no caching.
  static double compute(double p, double s, uint64_t samples);

  // Text persistence, one `p s scale samples` row per entry (samples 0 =
  // analytic). Load merges into the current table.
  void load(std::istream& in);
  void save(std::ostream& out) const;
  bool load_file(const std::string& path);  // false if the file is absent
  void save_file(const std::string& path) const;

  const std::map<std::pair<double, double>, Entry>& entries() const { return entries_; }

 private:
  std::map<std::pair<double, double>, Entry> entries_;
};

}  // namespace fptrack
