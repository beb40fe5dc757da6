#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fptrack/common.hpp"
#include "fptrack/generators.hpp"
#include "fptrack/stable.hpp"
#include "fptrack/tracker.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fptrack {

enum class StreamSpec { Zipf, Uniform, CashHard, TurnstileHard, File };
enum class CopyPolicy { Theorem1, Naive, Explicit };
enum class SketchKind { Ams, Stable };

/// Flat key-value experiment description; see README for the config file
/// keys (they mirror the fields 1:1).
struct ExperimentConfig {
  // stream source
  StreamSpec stream = StreamSpec::Zipf;
  std::string file;              // stream = file
  uint64_t n = 1024;             // generator universe
  uint64_t m = 100000;           // generator stream length (events)
  double skew = 1.1;             // zipf
  uint32_t hard_positions = 8;   // hard families: N
  uint32_t hard_players = 4;     // hard families: k

  // estimator
  double p = 2.0;
  double eps = 0.25;
  SketchKind sketch = SketchKind::Ams;
  size_t buckets = 0;            // 0 = ceil(16 / eps^2)
  CopyPolicy copies = CopyPolicy::Theorem1;
  size_t explicit_copies = 0;    // copies = explicit
  double C = 8.0;                // constant behind the copy/row formulas;
                                 // 8 is the uncalibrated default
  size_t rows = 0;               // stable: 0 = rows_for_tracking formula

  // run
  uint32_t trials = 100;
  uint64_t seed = 42;
  CheckpointPolicy checkpoints = CheckpointPolicy::EveryUpdate;
  double epoch_exponent = 1.0;
  int threads = 0;               // 0 = OpenMP default, 1 = serial reference
  bool short_circuit = false;    // stop trials at the first violation
  std::string out;               // per-trial CSV path ("" = none)
  std::string scale_table;       // persisted scale constants ("" = in-memory)
  uint64_t scale_samples = ScaleTable::kDefaultSamples;
  double min_success = -1.0;     // CLI exit-1 threshold (< 0 = off)

  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

/// Stream, ground truth and resolved estimator sizes for one experiment.
/// Built once; trials share it read-only.
struct ResolvedExperiment {
  StreamData stream;
  StreamProfile profile;
  SketchKind kind = SketchKind::Ams;
  double p = 2.0;
  size_t copies = 1;
  size_t buckets = 0;
  size_t rows = 0;
  double scale = 1.0;  // stable quantile scale constant
  uint64_t f0 = 0;
};

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg);

/// Re-applies the copy/row policy after cfg.C or cfg.explicit_copies
/// changed; everything stream-related is left alone.
void apply_copy_policy(const ExperimentConfig& cfg, ResolvedExperiment& rx);

struct TrialResult {
  bool success = false;
  double max_rel_error = 0.0;
  uint64_t argmax_checkpoint = 0;
  uint64_t first_violation = 0;  // 0 = none
  uint64_t skipped_zero = 0;
  uint32_t epochs = 0;
  double millis = 0.0;  // wall clock; excluded from CSV so re-runs diff clean
};

struct AggregateReport {
  std::vector<TrialResult> trials;
  size_t copies = 0;
  size_t rows = 0;
  uint64_t f0 = 0;
  uint64_t total_updates = 0;
  uint32_t epochs = 0;

  double success_fraction() const;
  /// 3-sigma binomial half width at the observed fraction and trial count.
  double half_width() const;
  double mean_max_rel_error() const;
  double max_max_rel_error() const;
  double total_millis() const;

  /// Deterministic per-trial table; byte-identical across re-runs.
  std::string csv() const;
  /// One-paragraph human summary (includes wall clock).
  std::string summary() const;
};

/// Default estimator: a Tracker of the resolved kind, seeded per trial.
struct TrackerFactory {
  Tracker operator()(const ResolvedExperiment& rx, uint64_t trial_seed) const {
    if (rx.kind == SketchKind::Ams)
      return Tracker::ams(rx.stream.universe, rx.copies, rx.buckets, trial_seed);
    return Tracker::stable(rx.stream.universe, rx.copies, rx.rows, rx.p, rx.scale, trial_seed);
  }
};

/// Runs cfg.trials tracking trials against a shared resolved experiment.
/// Trial t seeds its estimator with mix64(cfg.seed, kTrial, t), so the
/// result is one deterministic function of (config, seed) regardless of
/// thread count; trials run in an OpenMP pool unless cfg.threads == 1,
/// which takes the serial reference path.
template <class Factory>
AggregateReport run_resolved_with(const ExperimentConfig& cfg, const ResolvedExperiment& rx,
                                  Factory&& make);

template <class Factory>
AggregateReport run_experiment_with(const ExperimentConfig& cfg, Factory&& make) {
  const ResolvedExperiment rx = resolve_experiment(cfg);
  return run_resolved_with(cfg, rx, std::forward<Factory>(make));
}

AggregateReport run_experiment(const ExperimentConfig& cfg);

struct CalibrationResult {
  bool met = false;
  double constant = 0.0;  // best C when !met
  double success = 0.0;
  std::vector<std::pair<double, double>> probes;  // (C, success fraction)
};

/// Smallest C in {1, 2, 4, 8, 16} whose copy formula reaches the target
/// all-times success fraction on the reference config. Never throws on a
/// miss; the result reports the best grid point instead.
template <class Factory>
CalibrationResult calibrate_constant_with(const ExperimentConfig& reference, double target,
                                          Factory&& make);
CalibrationResult calibrate_constant(const ExperimentConfig& reference, double target);

struct SweepRow {
  uint64_t m = 0;
  int l_min = 0;
  int l_naive = 0;
  double success = 0.0;  // fraction observed at l_min
};

/// Minimal copy count reaching >= 0.9 all-times success for each stream
/// length, probed at a fixed 100-trial budget against prefixes of one
/// shared stream with shared per-trial seeds: a trial that succeeds on a
/// longer prefix succeeds on every shorter one, so the scan (first odd l
/// that reaches the target, starting from the previous length's answer) is
/// monotone in m by construction.
template <class Factory>
std::vector<SweepRow> scaling_sweep_with(const ExperimentConfig& cfg,
                                         std::span<const uint64_t> lengths, Factory&& make);
std::vector<SweepRow> scaling_sweep(const ExperimentConfig& cfg,
                                    std::span<const uint64_t> lengths);

/// `m,l_min,l_naive` rows.
std::string sweep_csv(std::span<const SweepRow> rows);

// ---------------------------------------------------------------------------

template <class Factory>
AggregateReport run_resolved_with(const ExperimentConfig& cfg, const ResolvedExperiment& rx,
                                  Factory&& make) {
  TrackOptions opts;
  opts.policy = cfg.checkpoints;
  opts.epoch_exponent = cfg.epoch_exponent;
  opts.stop_at_first_violation = cfg.short_circuit;

  AggregateReport report;
  report.copies = rx.copies;
  report.rows = rx.rows;
  report.f0 = rx.f0;
  report.total_updates = rx.profile.total_updates;
  report.epochs = rx.profile.epochs;
  report.trials.resize(cfg.trials);

  const auto run_one = [&](uint32_t t) {
    const auto start = std::chrono::steady_clock::now();
    auto estimator = make(rx, mix64(cfg.seed, seed_role::kTrial, t));
    const TrackReport rep =
        evaluate_tracking(std::span<const StreamEvent>(rx.stream.events), rx.stream.mode,
                          cfg.p, cfg.eps, estimator, opts, &rx.profile);
    TrialResult r;
    r.success = rep.all_times_success;
    r.max_rel_error = rep.max_rel_error;
    r.argmax_checkpoint = rep.argmax_checkpoint;
    r.first_violation = rep.first_violation.value_or(0);
    r.skipped_zero = rep.skipped_zero;
    r.epochs = rep.epochs;
    r.millis = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
                   .count();
    return r;
  };

  if (cfg.threads == 1) {
    for (uint32_t t = 0; t < cfg.trials; ++t) report.trials[t] = run_one(t);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) \
    num_threads(cfg.threads > 0 ? cfg.threads : omp_get_max_threads())
#endif
    for (int64_t t = 0; t < static_cast<int64_t>(cfg.trials); ++t)
      report.trials[static_cast<size_t>(t)] = run_one(static_cast<uint32_t>(t));
  }
  return report;
}

template <class Factory>
CalibrationResult calibrate_constant_with(const ExperimentConfig& reference, double target,
                                          Factory&& make) {
  if (!(target > 0.0) || !(target < 1.0))
    throw std::invalid_argument("calibration target must lie in (0, 1)");
  ExperimentConfig cfg = reference;
  cfg.out.clear();
  ResolvedExperiment rx = resolve_experiment(cfg);

  CalibrationResult result;
  for (double C : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    cfg.C = C;
    apply_copy_policy(cfg, rx);
    const AggregateReport report = run_resolved_with(cfg, rx, make);
    const double success = report.success_fraction();
    result.probes.emplace_back(C, success);
    if (success >= target) {
      result.met = true;
      result.constant = C;
      result.success = success;
      return result;
    }
  }
  // Nothing met the target; report the best grid point instead of failing.
  result.met = false;
  double best = -1.0;
  for (const auto& [C, success] : result.probes) {
    if (success > best) {
      best = success;
      result.constant = C;
      result.success = success;
    }
  }
  return result;
}

template <class Factory>
std::vector<SweepRow> scaling_sweep_with(const ExperimentConfig& cfg,
                                         std::span<const uint64_t> lengths, Factory&& make) {
  if (lengths.size() < 2) throw std::invalid_argument("sweep needs >= 2 stream lengths");
  std::vector<uint64_t> ms(lengths.begin(), lengths.end());
  std::sort(ms.begin(), ms.end());

  ExperimentConfig probe_cfg = cfg;
  probe_cfg.m = ms.back();
  probe_cfg.trials = 100;  // fixed probe budget
  probe_cfg.copies = CopyPolicy::Explicit;
  probe_cfg.explicit_copies = 1;
  probe_cfg.short_circuit = true;
  probe_cfg.out.clear();

  const ResolvedExperiment full = resolve_experiment(probe_cfg);

  constexpr double kTarget = 0.9;
  std::vector<SweepRow> rows;
  int l = 1;
  for (uint64_t m : ms) {
    if (m > full.stream.events.size())
      throw std::invalid_argument("sweep length exceeds the generated stream");
    ResolvedExperiment rx;
    rx.kind = full.kind;
    rx.p = full.p;
    rx.scale = full.scale;
    rx.stream.mode = full.stream.mode;
    rx.stream.universe = full.stream.universe;
    rx.stream.events.assign(full.stream.events.begin(),
                            full.stream.events.begin() + static_cast<ptrdiff_t>(m));
    TrackOptions opts;
    opts.policy = probe_cfg.checkpoints;
    opts.epoch_exponent = probe_cfg.epoch_exponent;
    rx.profile = profile_stream(rx.stream.events, rx.stream.mode, rx.stream.universe,
                                probe_cfg.p, probe_cfg.eps, opts);
    rx.f0 = rx.profile.final_f0;

    SweepRow row;
    row.m = m;
    for (;; l += 2) {
      probe_cfg.explicit_copies = static_cast<size_t>(l);
      apply_copy_policy(probe_cfg, rx);
      if (rx.kind == SketchKind::Stable) {
        rx.copies = 1;
        rx.rows = static_cast<size_t>(l);
      }
      const AggregateReport report = run_resolved_with(probe_cfg, rx, make);
      row.success = report.success_fraction();
      if (row.success >= kTarget) break;
    }
    row.l_min = l;
    row.l_naive = static_cast<int>(
        std::ceil(std::log2(static_cast<double>(std::max<uint64_t>(m, 2)))) * cfg.C);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fptrack
