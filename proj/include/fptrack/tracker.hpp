#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fptrack/ams.hpp"
#include "fptrack/stable_sketch.hpp"
#include "fptrack/stream.hpp"

namespace fptrack {

/// Copies needed for the all-times guarantee in the cash-register model:
/// the next odd integer >= C * (log2 F0 + log2 log2 m + log2(1/eps)),
/// never below 1. C is the calibration constant hidden by the O(.).
int copies_for_tracking(uint64_t f0_bound, uint64_t m, double eps, double C);

/// Union-bound baseline: next odd integer >= C * log2 m.
int naive_copies(uint64_t m, double C);

/// Row count for the p-stable tracker:
/// ceil((C / eps^2) * (log2 F0 + log2 log2 m + log2(1/eps))), >= 1.
int rows_for_tracking(uint64_t f0_bound, uint64_t m, double eps, double C);

/// l independent sketch copies plus a running lower-median estimate. Copy c
/// derives its seed as mix64(master_seed, kCopy, c), so copies are
/// independent yet reproducible from the master seed alone.
class Tracker {
 public:
  enum class Kind { Ams, Stable };

  static Tracker ams(uint64_t universe, size_t copies, size_t buckets, uint64_t master_seed);
  static Tracker stable(uint64_t universe, size_t copies, size_t rows, double p,
                        double scale, uint64_t master_seed);

  void update(uint64_t item, int64_t delta);
  void update(const StreamEvent& e);

  /// Lower median of the copy estimates.
  double estimate() const;

  Kind kind() const { return kind_; }
  size_t copies() const;
  uint64_t master_seed() const { return master_seed_; }
  std::vector<AmsSketch>& ams_copies() { return ams_; }
  std::vector<StableSketch>& stable_copies() { return stable_; }

 private:
  Tracker(Kind kind, uint64_t master_seed) : kind_(kind), master_seed_(master_seed) {}

  Kind kind_;
  uint64_t master_seed_;
  std::vector<AmsSketch> ams_;
  std::vector<StableSketch> stable_;
  mutable std::vector<double> scratch_;
};

// ---------------------------------------------------------------------------
// Tracking evaluation
// ---------------------------------------------------------------------------

enum class CheckpointPolicy {
  EveryUpdate,      // expand run-length events into unit updates
  EventBoundaries,  // one checkpoint per event
};

/// Epoch thresholds on the l1 norm, growing by the factor
/// 1 + eps / F0^c from 1. An epoch completes each time the norm first
/// exceeds the current threshold; with eps = 1, c = 0 the thresholds double
/// and a stream of m copies of one item spans ceil(log2 m) epochs.
class EpochSchedule {
 public:
  EpochSchedule(double eps, double poly_exponent, uint64_t f0);

  /// Advances past all thresholds below `l1`; returns epochs completed.
  uint32_t advance(uint64_t l1);

  uint32_t count() const { return count_; }
  double ratio() const { return ratio_; }

 private:
  double ratio_;
  double threshold_ = 1.0;
  uint32_t count_ = 0;
};

/// Number of epochs a cash-register stream spans with growth factor
/// 1 + eps / F0^c, F0 the final distinct count. Rejects turnstile streams
/// (their l1 norm is not monotone).
uint32_t epoch_count(std::span<const StreamEvent> events, StreamMode mode,
                     uint64_t universe, double eps, double poly_exponent);

struct TrackOptions {
  CheckpointPolicy policy = CheckpointPolicy::EveryUpdate;
  double epoch_exponent = 1.0;
  bool record_checkpoints = false;
  bool stop_at_first_violation = false;
};

/// Ground truth per checkpoint, computed once per stream so that repeated
/// trials replay only the sketches. Checkpoints are numbered 1..size by
/// applied update (EveryUpdate) or event (EventBoundaries).
struct StreamProfile {
  CheckpointPolicy policy = CheckpointPolicy::EveryUpdate;
  double p = 2.0;
  std::vector<double> exact;   // F_p at each checkpoint
  std::vector<uint64_t> l1;
  std::vector<uint32_t> epoch; // epochs completed; 0 throughout for turnstile
  uint64_t final_f0 = 0;
  uint64_t total_updates = 0;
  uint32_t epochs = 0;
};

StreamProfile profile_stream(std::span<const StreamEvent> events, StreamMode mode,
                             uint64_t universe, double p, double eps,
                             const TrackOptions& opts);

/// Universe implied by a raw event span (max item + 1); helper for the
/// profile-less evaluate_tracking path.
uint64_t universe_of(std::span<const StreamEvent> events);

struct CheckpointRow {
  uint64_t checkpoint = 0;
  uint64_t l1 = 0;
  double exact = 0.0;
  double estimate = 0.0;
  double rel_error = 0.0;  // NaN where the exact moment is zero
  uint32_t epoch = 0;
};

/// Outcome of one tracking trial. all_times_success holds exactly when
/// max_rel_error <= eps over every checkpoint with a nonzero exact moment.
struct TrackReport {
  bool all_times_success = true;
  double eps = 0.0;
  double max_rel_error = 0.0;
  uint64_t argmax_checkpoint = 0;
  std::optional<uint64_t> first_violation;
  uint64_t checkpoints = 0;
  uint64_t skipped_zero = 0;  // checkpoints with F_p = 0 (guarantee vacuous)
  uint32_t epochs = 0;
  std::vector<CheckpointRow> rows;  // filled when record_checkpoints is set

  /// `checkpoint,l1_norm,exact,estimate,rel_error,epoch_index` rows.
  void write_csv(std::ostream& out) const;
};

/// Feeds the stream into `estimator` and compares its estimate with the
/// exact moment at every checkpoint. Estimator needs
/// update(uint64_t, int64_t) and estimate() const; Tracker qualifies, as do
/// test oracles. Pass a precomputed profile to share ground truth across
/// trials; it must match (events, mode, p, opts.policy).
template <class Estimator>
TrackReport evaluate_tracking(std::span<const StreamEvent> events, StreamMode mode,
                              double p, double eps, Estimator& estimator,
                              const TrackOptions& opts = {},
                              const StreamProfile* profile = nullptr);

// ---------------------------------------------------------------------------
// Neighborhood stability experiment
// ---------------------------------------------------------------------------

struct BallStabilityResult {
  uint32_t trials = 0;
  uint32_t successes = 0;
  double probability = 0.0;
  double radius = 0.0;
  size_t buckets = 0;
};

/// Estimates the probability, over random (g, h) with k = ceil(16/eps^2)
/// buckets, that the approximation ratio stays within 1 +- eps on an entire
/// l1 ball around `center` with radius
///   r = radius_coeff * ||center||_1 * eps / F0^{3/2},
/// F0 the number of nonzero center coordinates. The ball is a continuum, so
/// each trial checks the center plus `samples_per_ball` uniform samples; a
/// trial succeeds only if every sampled point is within tolerance.
/// radius_coeff = 0 degenerates to the one-shot check at the center.
BallStabilityResult ball_stability_experiment(std::span<const double> center, double eps,
                                              double radius_coeff, uint32_t trials,
                                              uint32_t samples_per_ball, uint64_t seed,
                                              int threads = 0);

// ---------------------------------------------------------------------------

template <class Estimator>
TrackReport evaluate_tracking(std::span<const StreamEvent> events, StreamMode mode,
                              double p, double eps, Estimator& estimator,
                              const TrackOptions& opts, const StreamProfile* profile) {
  StreamProfile local;
  if (profile == nullptr) {
    local = profile_stream(events, mode, universe_of(events), p, eps, opts);
    profile = &local;
  }
  TrackReport report;
  report.eps = eps;
  report.epochs = profile->epochs;
  if (opts.record_checkpoints) report.rows.reserve(profile->exact.size());

  uint64_t ci = 0;
  const auto checkpoint = [&](double estimate) {
    const double exact = profile->exact[ci];
    double rel = std::numeric_limits<double>::quiet_NaN();
    if (exact == 0.0) {
      ++report.skipped_zero;
    } else {
      rel = std::abs(estimate - exact) / exact;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.argmax_checkpoint = ci + 1;
      }
      if (rel > eps && !report.first_violation) {
        report.first_violation = ci + 1;
        report.all_times_success = false;
      }
    }
    if (opts.record_checkpoints)
      report.rows.push_back({ci + 1, profile->l1[ci], exact, estimate, rel, profile->epoch[ci]});
    ++ci;
  };

  bool stopped = false;
  for (const StreamEvent& e : events) {
    if (opts.policy == CheckpointPolicy::EveryUpdate) {
      for (uint64_t r = 0; r < e.repeat; ++r) {
        estimator.update(e.item, e.delta);
        checkpoint(estimator.estimate());
        if (opts.stop_at_first_violation && report.first_violation) {
          stopped = true;
          break;
        }
      }
    } else {
      estimator.update(e.item, static_cast<int64_t>(e.delta) * static_cast<int64_t>(e.repeat));
      checkpoint(estimator.estimate());
    }
    if (stopped || (opts.stop_at_first_violation && report.first_violation)) break;
  }
  report.checkpoints = ci;
  return report;
}

}  // namespace fptrack
