#include "fptrack/tracker.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fptrack/common.hpp"

namespace fptrack {

namespace {

double theorem_term(uint64_t f0_bound, uint64_t m, double eps) {
  if (f0_bound < 1) throw std::invalid_argument("F0 bound must be >= 1");
  if (m < 2) throw std::invalid_argument("stream length must be >= 2");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  return std::log2(static_cast<double>(f0_bound)) +
         std::log2(std::log2(static_cast<double>(m))) + std::log2(1.0 / eps);
}

int next_odd_at_least(double x) {
  int v = static_cast<int>(std::ceil(x));
  if (v < 1) v = 1;
  if (v % 2 == 0) ++v;
  return v;
}

}  // namespace

int copies_for_tracking(uint64_t f0_bound, uint64_t m, double eps, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("constant C must be positive");
  return next_odd_at_least(C * theorem_term(f0_bound, m, eps));
}

int naive_copies(uint64_t m, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("constant C must be positive");
  if (m < 2) throw std::invalid_argument("stream length must be >= 2");
  return next_odd_at_least(C * std::log2(static_cast<double>(m)));
}

int rows_for_tracking(uint64_t f0_bound, uint64_t m, double eps, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("constant C must be positive");
  const double v = (C / (eps * eps)) * theorem_term(f0_bound, m, eps);
  return std::max(1, static_cast<int>(std::ceil(v)));
}

Tracker Tracker::ams(uint64_t universe, size_t copies, size_t buckets, uint64_t master_seed) {
  if (copies < 1) throw std::invalid_argument("tracker needs >= 1 copy");
  Tracker t(Kind::Ams, master_seed);
  t.ams_.reserve(copies);
  for (size_t c = 0; c < copies; ++c)
    t.ams_.emplace_back(universe, buckets, mix64(master_seed, seed_role::kCopy, c));
  return t;
}

Tracker Tracker::stable(uint64_t universe, size_t copies, size_t rows, double p,
                        double scale, uint64_t master_seed) {
  if (copies < 1) throw std::invalid_argument("tracker needs >= 1 copy");
  Tracker t(Kind::Stable, master_seed);
  t.stable_.reserve(copies);
  for (size_t c = 0; c < copies; ++c)
    t.stable_.emplace_back(universe, rows, p, scale, mix64(master_seed, seed_role::kCopy, c));
  return t;
}

size_t Tracker::copies() const {
  return kind_ == Kind::Ams ? ams_.size() : stable_.size();
}

void Tracker::update(uint64_t item, int64_t delta) {
  if (kind_ == Kind::Ams) {
    for (AmsSketch& s : ams_) s.update(item, delta);
  } else {
    for (StableSketch& s : stable_) s.update(item, delta);
  }
}

void Tracker::update(const StreamEvent& e) {
  update(e.item, static_cast<int64_t>(e.delta) * static_cast<int64_t>(e.repeat));
}

double Tracker::estimate() const {
  const size_t l = copies();
  scratch_.resize(l);
  if (kind_ == Kind::Ams) {
    for (size_t c = 0; c < l; ++c) scratch_[c] = ams_[c].estimate();
  } else {
    for (size_t c = 0; c < l; ++c) scratch_[c] = stable_[c].estimate();
  }
  return lower_median(scratch_);
}

EpochSchedule::EpochSchedule(double eps, double poly_exponent, uint64_t f0) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (f0 < 1) throw std::invalid_argument("F0 must be >= 1");
  ratio_ = 1.0 + eps / std::pow(static_cast<double>(f0), poly_exponent);
}

uint32_t EpochSchedule::advance(uint64_t l1) {
  while (static_cast<double>(l1) > threshold_) {
    ++count_;
    threshold_ *= ratio_;
  }
  return count_;
}

uint64_t universe_of(std::span<const StreamEvent> events) {
  uint64_t max_item = 0;
  for (const StreamEvent& e : events) max_item = std::max(max_item, e.item);
  return max_item + 1;
}

namespace {

uint64_t final_distinct_count(std::span<const StreamEvent> events, StreamMode mode,
                              uint64_t universe) {
  return replay(events, mode, universe).distinct_count();
}

}  // namespace

uint32_t epoch_count(std::span<const StreamEvent> events, StreamMode mode,
                     uint64_t universe, double eps, double poly_exponent) {
  if (mode != StreamMode::CashRegister)
    throw std::invalid_argument("epochs are defined for cash-register streams only");
  if (events.empty()) return 0;
  const uint64_t f0 = final_distinct_count(events, mode, universe);
  EpochSchedule schedule(eps, poly_exponent, f0);
  uint64_t l1 = 0;
  for (const StreamEvent& e : events) {
    if (e.delta < 0) throw std::invalid_argument("negative update in cash-register mode");
    l1 += e.repeat;
    schedule.advance(l1);
  }
  return schedule.count();
}

StreamProfile profile_stream(std::span<const StreamEvent> events, StreamMode mode,
                             uint64_t universe, double p, double eps,
                             const TrackOptions& opts) {
  StreamProfile profile;
  profile.policy = opts.policy;
  profile.p = p;
  profile.final_f0 = final_distinct_count(events, mode, universe);

  const bool track_epochs = mode == StreamMode::CashRegister;
  EpochSchedule schedule =
      track_epochs
          ? EpochSchedule(eps, opts.epoch_exponent, std::max<uint64_t>(profile.final_f0, 1))
          : EpochSchedule(1.0, 0.0, 1);

  FrequencyVector f(universe);
  double moment = 0.0;
  uint64_t l1 = 0;
  uint64_t units = 0;

  // Exact moment maintained incrementally with the same per-count rounding
  // as FrequencyVector::moment; the unit tests pin the equivalence. When the
  // vector cancels to empty the running value is resynced to exactly zero so
  // vacuous checkpoints are recognized as such.
  const auto apply_unit = [&](uint64_t item, int32_t delta, uint64_t repeat) {
    const int64_t old_count = f.count(item);
    f.apply({item, delta, repeat}, mode);
    const int64_t new_count = f.count(item);
    moment += count_moment(new_count, p) - count_moment(old_count, p);
    const uint64_t old_abs = static_cast<uint64_t>(old_count < 0 ? -old_count : old_count);
    const uint64_t new_abs = static_cast<uint64_t>(new_count < 0 ? -new_count : new_count);
    l1 = l1 + new_abs - old_abs;
    units += repeat;
    if (l1 == 0) moment = 0.0;
  };

  const auto checkpoint = [&]() {
    profile.exact.push_back(moment < 0.0 ? 0.0 : moment);
    profile.l1.push_back(l1);
    profile.epoch.push_back(track_epochs ? schedule.advance(l1) : 0);
  };

  for (const StreamEvent& e : events) {
    if (opts.policy == CheckpointPolicy::EveryUpdate) {
      for (uint64_t r = 0; r < e.repeat; ++r) {
        apply_unit(e.item, e.delta, 1);
        checkpoint();
      }
    } else {
      apply_unit(e.item, e.delta, e.repeat);
      checkpoint();
    }
  }
  profile.total_updates = units;
  profile.epochs = track_epochs ? schedule.count() : 0;
  return profile;
}

void TrackReport::write_csv(std::ostream& out) const {
  out << "checkpoint,l1_norm,exact,estimate,rel_error,epoch_index\n";
  for (const CheckpointRow& r : rows) {
    out << r.checkpoint << ',' << r.l1 << ',' << format_double(r.exact) << ','
        << format_double(r.estimate) << ',';
    if (std::isnan(r.rel_error)) {
      out << "nan";
    } else {
      out << format_double(r.rel_error);
    }
    out << ',' << r.epoch << '\n';
  }
}

namespace {

// Uniform point in the l1 ball of radius r around `center`: exponential
// magnitudes with random signs give a uniform direction on the cross
// polytope; u^{1/d} fills the volume.
void sample_l1_ball(std::span<const double> center, double radius, Rng& rng,
                    std::vector<double>& out) {
  const size_t d = center.size();
  out.assign(center.begin(), center.end());
  if (radius <= 0.0 || d == 0) return;
  std::vector<double> mag(d);
  double sum = 0.0;
  for (size_t i = 0; i < d; ++i) {
    mag[i] = -std::log(rng.uniform01());
    sum += mag[i];
  }
  const double scale =
      radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d)) / sum;
  uint64_t sign_bits = 0;
  for (size_t i = 0; i < d; ++i) {
    if (i % 64 == 0) sign_bits = rng.next();
    const double offset = mag[i] * scale;
    out[i] += (sign_bits >> (i % 64)) & 1 ? offset : -offset;
  }
}

}  // namespace

BallStabilityResult ball_stability_experiment(std::span<const double> center, double eps,
                                              double radius_coeff, uint32_t trials,
                                              uint32_t samples_per_ball, uint64_t seed,
                                              int threads) {
  if (center.empty()) throw std::invalid_argument("center must be nonempty");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (radius_coeff < 0.0) throw std::invalid_argument("radius coefficient must be >= 0");
  if (trials == 0) throw std::invalid_argument("need >= 1 trial");

  double l1 = 0.0;
  uint64_t f0 = 0;
  for (double v : center) {
    l1 += std::abs(v);
    if (v != 0.0) ++f0;
  }
  if (f0 == 0) throw std::invalid_argument("center must be nonzero");

  BallStabilityResult result;
  result.trials = trials;
  result.buckets = static_cast<size_t>(std::ceil(16.0 / (eps * eps)));
  result.radius = radius_coeff * l1 * eps / std::pow(static_cast<double>(f0), 1.5);

  const uint64_t dim = center.size();
  std::vector<uint8_t> success(trials, 0);

  const auto run_trial = [&](uint32_t t) {
    const HashFamily g =
        HashFamily::seeded(mix64(seed, seed_role::kSignHash, t), 4, dim, 2);
    const HashFamily h =
        HashFamily::seeded(mix64(seed, seed_role::kBucketHash, t), 2, dim, result.buckets);
    Rng rng(mix64(seed, seed_role::kBallSample, t));
    std::vector<double> point(center.begin(), center.end());
    if (std::abs(ams_ratio(point, g, h) - 1.0) > eps) return false;
    for (uint32_t s = 0; s < samples_per_ball; ++s) {
      sample_l1_ball(center, result.radius, rng, point);
      if (std::abs(ams_ratio(point, g, h) - 1.0) > eps) return false;
    }
    return true;
  };

  if (threads == 1) {
    for (uint32_t t = 0; t < trials; ++t) success[t] = run_trial(t);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
#endif
    for (int64_t t = 0; t < static_cast<int64_t>(trials); ++t)
      success[static_cast<size_t>(t)] = run_trial(static_cast<uint32_t>(t));
  }

  for (uint8_t s : success) result.successes += s;
  result.probability = static_cast<double>(result.successes) / trials;
  return result;
}

}  // namespace fptrack
