// Acceptance suite: runs every statistical guarantee the library is built
// around at desk scale and prints one PASS/FAIL line per criterion.
//
// Calibration constants are read from configs/calibrated.conf (produced by
// `track calibrate`); stable-sketch scale constants come from
// configs/scale_table.txt. Both fall back to built-in defaults when absent.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fptrack/harness.hpp"
#include "fptrack/morris.hpp"

using namespace fptrack;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] C%d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) { return format_double(v); }

struct Calibration {
  double ams_C = 8.0;     // uncalibrated default
  double stable_C = 8.0;  // uncalibrated default
};

Calibration load_calibration(const std::string& dir) {
  Calibration cal;
  std::ifstream in(dir + "/calibrated.conf");
  std::string line;
  while (std::getline(in, line)) {
    const size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    double value = 0.0;
    ls >> key >> value;
    if (key == "ams_C") cal.ams_C = value;
    if (key == "stable_C") cal.stable_C = value;
  }
  return cal;
}

ExperimentConfig reference_config(const std::string& config_dir) {
  ExperimentConfig cfg;
  cfg.stream = StreamSpec::Zipf;
  cfg.n = 1 << 10;
  cfg.m = 100000;
  cfg.skew = 1.1;
  cfg.p = 2.0;
  cfg.eps = 0.25;
  cfg.sketch = SketchKind::Ams;
  cfg.copies = CopyPolicy::Theorem1;
  cfg.trials = 200;
  cfg.seed = 42;
  cfg.scale_table = config_dir + "/scale_table.txt";
  return cfg;
}

// --- C1: AMS one-shot guarantee ---------------------------------------------
void criterion1() {
  const double eps = 0.25;
  const size_t k = static_cast<size_t>(std::ceil(16.0 / (eps * eps)));
  const uint32_t trials = 500;
  const auto stream = gen_zipf(1 << 10, 100000, 1.1, mix64(42, seed_role::kStream));
  const double f2 = replay(stream.events, stream.mode, stream.universe).moment(2.0);
  uint32_t failures = 0;
  for (uint32_t t = 0; t < trials; ++t) {
    AmsSketch sketch(stream.universe, k, mix64(42, seed_role::kTrial, t));
    for (const StreamEvent& e : stream.events) sketch.update(e.item, e.delta);
    failures += std::abs(sketch.estimate() - f2) > eps * f2;
  }
  const double rate = static_cast<double>(failures) / trials;
  const double bound = 1.0 / 3.0 + binomial_half_width(1.0 / 3.0, trials);
  report(1, "ams-one-shot", rate <= bound,
         "failure_rate=" + fmt(rate) + " <= " + fmt(bound) + " (k=" + std::to_string(k) +
             ", trials=500)");
}

// --- C2: AMS unbiasedness and variance ---------------------------------------
void criterion2() {
  std::vector<StreamEvent> events;
  for (uint64_t i = 0; i < 16; ++i) events.push_back({i, +1, i + 1});
  double f2 = 0.0;
  for (uint64_t i = 1; i <= 16; ++i) f2 += static_cast<double>(i * i);

  const size_t k = 16, trials = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (size_t t = 0; t < trials; ++t) {
    AmsSketch sketch(16, k, mix64(99, t));
    for (const StreamEvent& e : events)
      sketch.update(e.item, static_cast<int64_t>(e.repeat));
    const double est = sketch.estimate();
    sum += est;
    sum_sq += est * est;
  }
  const double mean = sum / trials;
  const double var = (sum_sq - trials * mean * mean) / (trials - 1);
  const double stderr_mean = std::sqrt(var / trials);
  const bool mean_ok = std::abs(mean - f2) <= 3.0 * stderr_mean;
  const double var_bound = 3.0 * f2 * f2 / static_cast<double>(k);
  const bool var_ok = var <= var_bound;
  report(2, "ams-unbiasedness", mean_ok && var_ok,
         "|mean-F2|=" + fmt(std::abs(mean - f2)) + " <= " + fmt(3.0 * stderr_mean) +
             ", var=" + fmt(var) + " <= " + fmt(var_bound));
}

// --- C3: Theorem-1 all-times tracking ----------------------------------------
void criterion3(const ExperimentConfig& reference) {
  const double bound = 0.5 - binomial_half_width(0.5, 200);
  bool all_ok = true;
  std::string detail;
  for (StreamSpec spec : {StreamSpec::Zipf, StreamSpec::Uniform}) {
    ExperimentConfig cfg = reference;
    cfg.stream = spec;
    const auto rep = run_experiment(cfg);
    const double success = rep.success_fraction();
    all_ok = all_ok && success >= bound;
    detail += std::string(spec == StreamSpec::Zipf ? "zipf" : "uniform") + "=" +
              fmt(success) + " (copies=" + std::to_string(rep.copies) + ") ";
  }
  report(3, "theorem1-tracking", all_ok, detail + ">= " + fmt(bound));
}

// --- C4: scaling separation ---------------------------------------------------
void criterion4(const ExperimentConfig& reference) {
  ExperimentConfig cfg = reference;
  const std::vector<uint64_t> lengths{1000, 10000, 100000, 1000000};
  const auto rows = scaling_sweep(cfg, lengths);
  bool monotone = true;
  for (size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].l_min >= rows[i - 1].l_min;
  const int growth = rows.back().l_min - rows.front().l_min;
  const int naive_growth = rows.back().l_naive - rows.front().l_naive;
  const bool separated = growth < naive_growth;
  std::string detail = "l_min=";
  for (const auto& r : rows) detail += std::to_string(r.l_min) + " ";
  detail += "growth=" + std::to_string(growth) + " < naive_growth=" +
            std::to_string(naive_growth);
  report(4, "scaling-separation", monotone && separated, detail);
}

// --- C5: Theorem-2 tracking at p = 1.5 ---------------------------------------
void criterion5(const ExperimentConfig& reference, double stable_C) {
  ExperimentConfig cfg = reference;
  cfg.sketch = SketchKind::Stable;
  cfg.p = 1.5;
  cfg.C = stable_C;
  cfg.trials = 100;
  const auto rep = run_experiment(cfg);
  const double bound = 0.5 - binomial_half_width(0.5, 100);
  const double success = rep.success_fraction();
  report(5, "theorem2-tracking-p1.5", success >= bound,
         "success=" + fmt(success) + " >= " + fmt(bound) +
             " (rows=" + std::to_string(rep.rows) + ")");
}

// --- C6: neighborhood stability ----------------------------------------------
void criterion6() {
  std::vector<double> center(16);
  Rng rng(mix64(6, seed_role::kStream));
  for (auto& v : center) v = rng.uniform01() + 0.5;
  const uint32_t trials = 500, samples = 200;

  const auto full = ball_stability_experiment(center, 0.25, 0.1, trials, samples, 6);
  const double bound = 2.0 / 3.0 - binomial_half_width(2.0 / 3.0, trials);
  const bool ball_ok = full.probability >= bound;

  // radius_coeff = 0 control: must reproduce the one-shot rate exactly.
  const auto control = ball_stability_experiment(center, 0.25, 0.0, trials, samples, 6);
  uint32_t direct = 0;
  for (uint32_t t = 0; t < trials; ++t) {
    const auto g = HashFamily::seeded(mix64(6, seed_role::kSignHash, t), 4, 16, 2);
    const auto h = HashFamily::seeded(mix64(6, seed_role::kBucketHash, t), 2, 16,
                                      control.buckets);
    direct += std::abs(ams_ratio(center, g, h) - 1.0) <= 0.25;
  }
  const bool control_ok = control.successes == direct && control.probability >= bound;
  report(6, "ball-stability", ball_ok && control_ok,
         "ball=" + fmt(full.probability) + " control=" + fmt(control.probability) +
             " >= " + fmt(bound) + " (radius=" + fmt(full.radius) + ")");
}

// --- C7: linearity of both sketches ------------------------------------------
void criterion7() {
  Rng rng(77);
  const auto stream = gen_zipf(512, 2000, 1.1, 7).events;
  bool ams_ok = true;
  for (int split = 0; split < 100; ++split) {
    const size_t cut = rng.below(stream.size() + 1);
    const uint64_t seed = rng.next();
    AmsSketch left(512, 64, seed), right(512, 64, seed), whole(512, 64, seed);
    for (size_t i = 0; i < stream.size(); ++i) {
      (i < cut ? left : right).update(stream[i].item, 1);
      whole.update(stream[i].item, 1);
    }
    left.merge(right);
    ams_ok = ams_ok && left == whole && left.estimate() == whole.estimate();
  }

  bool stable_ok = true;
  double worst = 0.0;
  for (int split = 0; split < 100; ++split) {
    const size_t cut = rng.below(stream.size() + 1);
    const uint64_t seed = rng.next();
    StableSketch left(512, 16, 1.5, 1.0, seed), right(512, 16, 1.5, 1.0, seed),
        whole(512, 16, 1.5, 1.0, seed);
    for (size_t i = 0; i < stream.size(); ++i) {
      (i < cut ? left : right).update(stream[i].item, 1);
      whole.update(stream[i].item, 1);
    }
    left.merge(right);
    for (size_t j = 0; j < 16; ++j) {
      const double denom = std::max(1.0, std::abs(whole.accumulators()[j]));
      const double rel = std::abs(left.accumulators()[j] - whole.accumulators()[j]) / denom;
      worst = std::max(worst, rel);
      stable_ok = stable_ok && rel <= 1e-9;
    }
  }
  report(7, "linearity-merge-split", ams_ok && stable_ok,
         std::string("ams=bit-exact over 100 splits, stable_max_rel=") + fmt(worst) +
             " <= 1e-9");
}

// --- C8: hard-instance gaps ----------------------------------------------------
void criterion8() {
  bool ok = true;
  double worst_margin = 1e300;
  for (double p : {1.5, 2.0}) {
    const auto params = hard_params(p, HardFamily::CashRegister);
    const double threshold = hard_gap_threshold(p);
    const double slack = p == 2.0 ? 0.0 : 1e-9;
    Rng rng(p == 2.0 ? 81 : 82);
    for (uint32_t N = 1; N <= 8; ++N) {
      for (uint32_t k = 1; k <= std::min(N, 4u); ++k) {
        const auto base = CashHardInput::random(N, k, rng.next());
        for (size_t j = 0; j < k; ++j) {
          const auto yes = gen_cash_hard(params, base.with_planted(j, true));
          const auto no = gen_cash_hard(params, base.with_planted(j, false));
          const auto fy = replay(yes.events, yes.mode, yes.universe,
                                 yes.checkpoints[j].event_index);
          const auto fn = replay(no.events, no.mode, no.universe,
                                 no.checkpoints[j].event_index);
          const double gap = gap_check(fy, fn, p);
          worst_margin = std::min(worst_margin, gap - threshold);
          ok = ok && gap >= threshold - slack;
        }
      }
    }
  }

  bool cancel_ok = true;
  for (double p : {1.5, 2.0}) {
    const auto params = hard_params(p, HardFamily::Turnstile);
    Rng rng(83);
    for (uint32_t N = 1; N <= 8; ++N) {
      for (uint32_t k = 1; k <= std::min(N, 4u); ++k) {
        const auto gen =
            gen_turnstile_hard(params, TurnstileHardInput::random(N, k, rng.next()));
        uint64_t prev_end = 0;
        FrequencyVector f(gen.universe);
        for (const Checkpoint& ckpt : gen.checkpoints) {
          const uint64_t phase_end = 2 * ckpt.event_index - prev_end;
          for (uint64_t e = prev_end; e < phase_end; ++e)
            f.apply(gen.events[e], StreamMode::Turnstile);
          cancel_ok = cancel_ok && f.empty();
          prev_end = phase_end;
        }
      }
    }
  }
  report(8, "hard-instance-gap", ok && cancel_ok,
         "min_gap_margin=" + fmt(worst_margin) + " >= 0, turnstile phases cancel exactly");
}

// --- C9: stable sampler --------------------------------------------------------
void criterion9() {
  const StableSampler cauchy(1.0, 31337);
  std::vector<double> mags(1000000);
  for (size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(cauchy.sample(i));
  const double med = lower_quantile(mags, 0.5);
  const bool med_ok = std::abs(med - 1.0) <= 0.02;

  const StableSampler gauss(2.0, 4242);
  double mean = 0.0;
  for (size_t i = 0; i < 1000000; ++i) mean += gauss.sample(i);
  mean /= 1e6;
  double var = 0.0;
  for (size_t i = 0; i < 1000000; ++i) {
    const double d = gauss.sample(i) - mean;
    var += d * d;
  }
  var /= 1e6 - 1;
  const bool var_ok = std::abs(var - 2.0) <= 0.02;

  bool ks_ok = true;
  double worst_ks = 0.0;
  const double a = 3.0, b = 4.0;
  for (double p : {1.0, 1.5, 2.0}) {
    const StableSampler sx(p, 111), sy(p, 222), sz(p, 333);
    const size_t n = 100000;
    std::vector<double> combined(n), scaled(n);
    const double c = std::pow(std::pow(a, p) + std::pow(b, p), 1.0 / p);
    for (size_t i = 0; i < n; ++i) {
      combined[i] = a * sx.sample(i) + b * sy.sample(i);
      scaled[i] = c * sz.sample(i);
    }
    std::sort(combined.begin(), combined.end());
    std::sort(scaled.begin(), scaled.end());
    double d = 0.0;
    size_t i = 0, j = 0;
    while (i < n && j < n) {
      if (combined[i] <= scaled[j]) ++i; else ++j;
      d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / n);
    }
    worst_ks = std::max(worst_ks, d);
    ks_ok = ks_ok && d < 0.01;
  }
  report(9, "stable-sampler", med_ok && var_ok && ks_ok,
         "cauchy_med=" + fmt(med) + " gauss_var=" + fmt(var) + " max_ks=" + fmt(worst_ks));
}

// --- C10: exact oracle and Morris counter --------------------------------------
void criterion10() {
  bool oracle_ok = true;
  for (int mode_i = 0; mode_i < 2 && oracle_ok; ++mode_i) {
    const StreamMode mode = mode_i == 0 ? StreamMode::CashRegister : StreamMode::Turnstile;
    const int alternatives = mode == StreamMode::CashRegister ? 3 : 6;
    for (int len = 0; len <= 6 && oracle_ok; ++len) {
      int total = 1;
      for (int i = 0; i < len; ++i) total *= alternatives;
      for (int word = 0; word < total && oracle_ok; ++word) {
        std::vector<StreamEvent> events;
        int w = word;
        for (int i = 0; i < len; ++i) {
          const int code = w % alternatives;
          events.push_back(mode == StreamMode::CashRegister
                               ? StreamEvent{static_cast<uint64_t>(code), +1, 1}
                               : StreamEvent{static_cast<uint64_t>(code / 2),
                                             code % 2 ? -1 : +1, 1});
          w /= alternatives;
        }
        TrackOptions opts;
        const auto profile = profile_stream(events, mode, 3, 2.0, 0.25, opts);
        std::map<uint64_t, long long> counts;
        for (size_t i = 0; i < events.size(); ++i) {
          counts[events[i].item] += events[i].delta;
          double expected = 0.0;
          for (const auto& [item, c] : counts)
            expected += static_cast<double>(c) * static_cast<double>(c);
          oracle_ok = oracle_ok && profile.exact[i] == expected;
        }
      }
    }
  }

  const size_t trials = 10000, m = 10000;
  double sum = 0.0;
  for (size_t t = 0; t < trials; ++t) {
    MorrisCounter c(mix64(7, t));
    for (size_t i = 0; i < m; ++i) c.increment();
    sum += c.estimate();
  }
  const double dev = std::abs(sum / trials - static_cast<double>(m));
  const bool morris_ok = dev <= 0.01 * static_cast<double>(m);
  report(10, "oracle-and-morris", oracle_ok && morris_ok,
         "exhaustive prefixes exact at p=2; morris_mean_dev=" + fmt(dev) + " <= 100");
}

}  // namespace

int main() {
  const std::string config_dir = FPTRACK_CONFIG_DIR;
  const Calibration cal = load_calibration(config_dir);
  std::printf("# calibration: ams_C=%s stable_C=%s (from %s)\n", fmt(cal.ams_C).c_str(),
              fmt(cal.stable_C).c_str(), (config_dir + "/calibrated.conf").c_str());

  ExperimentConfig reference = reference_config(config_dir);
  reference.C = cal.ams_C;

  criterion1();
  criterion2();
  criterion3(reference);
  criterion4(reference);
  criterion5(reference, cal.stable_C);
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();

  if (g_failures == 0) {
    std::printf("all 10 acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
