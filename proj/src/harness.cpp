#include "fptrack/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fptrack {

namespace {

StreamSpec parse_stream(const std::string& v) {
  if (v == "zipf") return StreamSpec::Zipf;
  if (v == "uniform") return StreamSpec::Uniform;
  if (v == "cash-hard") return StreamSpec::CashHard;
  if (v == "turnstile-hard") return StreamSpec::TurnstileHard;
  if (v == "file") return StreamSpec::File;
  throw std::invalid_argument("unknown stream spec: " + v);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (ls.fail()) throw std::invalid_argument("config: bad line: " + line);

    if (key == "stream") cfg.stream = parse_stream(value);
    else if (key == "file") cfg.file = value;
    else if (key == "n") cfg.n = std::stoull(value);
    else if (key == "m") cfg.m = static_cast<uint64_t>(std::stod(value));
    else if (key == "skew") cfg.skew = std::stod(value);
    else if (key == "hard_positions") cfg.hard_positions = static_cast<uint32_t>(std::stoul(value));
    else if (key == "hard_players") cfg.hard_players = static_cast<uint32_t>(std::stoul(value));
    else if (key == "p") cfg.p = std::stod(value);
    else if (key == "eps") cfg.eps = std::stod(value);
    else if (key == "sketch") {
      if (value == "ams") cfg.sketch = SketchKind::Ams;
      else if (value == "stable") cfg.sketch = SketchKind::Stable;
      else throw std::invalid_argument("config: sketch must be ams|stable");
    } else if (key == "buckets") cfg.buckets = std::stoull(value);
    else if (key == "copies") {
      if (value == "theorem1") cfg.copies = CopyPolicy::Theorem1;
      else if (value == "naive") cfg.copies = CopyPolicy::Naive;
      else if (value == "explicit") cfg.copies = CopyPolicy::Explicit;
      else throw std::invalid_argument("config: copies must be theorem1|naive|explicit");
    } else if (key == "l") cfg.explicit_copies = std::stoull(value);
    else if (key == "C") cfg.C = std::stod(value);
    else if (key == "rows") cfg.rows = std::stoull(value);
    else if (key == "trials") cfg.trials = static_cast<uint32_t>(std::stoul(value));
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "checkpoints") {
      if (value == "every_update") cfg.checkpoints = CheckpointPolicy::EveryUpdate;
      else if (value == "boundaries") cfg.checkpoints = CheckpointPolicy::EventBoundaries;
      else throw std::invalid_argument("config: checkpoints must be every_update|boundaries");
    } else if (key == "epoch_exponent") cfg.epoch_exponent = std::stod(value);
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "short_circuit") cfg.short_circuit = value != "0";
    else if (key == "out") cfg.out = value;
    else if (key == "scale_table") cfg.scale_table = value;
    else if (key == "scale_samples") cfg.scale_samples = static_cast<uint64_t>(std::stod(value));
    else if (key == "min_success") cfg.min_success = std::stod(value);
    else throw std::invalid_argument("config: unknown key: " + key);
  }
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(cfg.eps > 0.0) || !(cfg.eps < 1.0)) throw std::invalid_argument("config: eps must lie in (0, 1)");
  if (!(cfg.p > 0.0) || cfg.p > 2.0) throw std::invalid_argument("config: p must lie in (0, 2]");
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

namespace {

StreamData make_stream(const ExperimentConfig& cfg) {
  const uint64_t stream_seed = mix64(cfg.seed, seed_role::kStream);
  switch (cfg.stream) {
    case StreamSpec::Zipf:
      return gen_zipf(cfg.n, cfg.m, cfg.skew, stream_seed).data();
    case StreamSpec::Uniform:
      return gen_uniform(cfg.n, cfg.m, stream_seed).data();
    case StreamSpec::CashHard: {
      const HardParams params = hard_params(cfg.p, HardFamily::CashRegister);
      const auto input =
          CashHardInput::random(cfg.hard_positions, cfg.hard_players, stream_seed);
      return gen_cash_hard(params, input).data();
    }
    case StreamSpec::TurnstileHard: {
      const HardParams params = hard_params(cfg.p, HardFamily::Turnstile);
      const auto input =
          TurnstileHardInput::random(cfg.hard_positions, cfg.hard_players, stream_seed);
      return gen_turnstile_hard(params, input).data();
    }
    case StreamSpec::File:
      return load_stream_file(cfg.file);
  }
  throw std::logic_error("unreachable stream spec");
}

}  // namespace

void apply_copy_policy(const ExperimentConfig& cfg, ResolvedExperiment& rx) {
  const uint64_t f0 = std::max<uint64_t>(rx.f0, 1);
  const uint64_t m = std::max<uint64_t>(rx.profile.total_updates, 2);
  if (rx.kind == SketchKind::Ams) {
    rx.buckets = cfg.buckets != 0
                     ? cfg.buckets
                     : static_cast<size_t>(std::ceil(16.0 / (cfg.eps * cfg.eps)));
    switch (cfg.copies) {
      case CopyPolicy::Theorem1:
        rx.copies = static_cast<size_t>(copies_for_tracking(f0, m, cfg.eps, cfg.C));
        break;
      case CopyPolicy::Naive:
        rx.copies = static_cast<size_t>(naive_copies(m, cfg.C));
        break;
      case CopyPolicy::Explicit:
        if (cfg.explicit_copies < 1)
          throw std::invalid_argument("explicit copy policy needs l >= 1");
        rx.copies = cfg.explicit_copies;
        break;
    }
    rx.rows = 0;
  } else {
    // The p-stable estimator medians internally across its rows; the tracker
    // wraps a single copy whose row count carries the 1/eps^2 factor.
    rx.copies = std::max<size_t>(cfg.explicit_copies, 1);
    if (cfg.copies != CopyPolicy::Explicit) rx.copies = 1;
    rx.rows = cfg.rows != 0
                  ? cfg.rows
                  : static_cast<size_t>(rows_for_tracking(f0, m, cfg.eps, cfg.C));
    rx.buckets = 0;
  }
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg) {
  ResolvedExperiment rx;
  rx.kind = cfg.sketch;
  rx.p = cfg.p;
  rx.stream = make_stream(cfg);

  TrackOptions opts;
  opts.policy = cfg.checkpoints;
  opts.epoch_exponent = cfg.epoch_exponent;
  rx.profile = profile_stream(rx.stream.events, rx.stream.mode, rx.stream.universe,
                              cfg.p, cfg.eps, opts);
  rx.f0 = rx.profile.final_f0;

  if (cfg.sketch == SketchKind::Stable) {
    ScaleTable table;
    if (!cfg.scale_table.empty()) table.load_file(cfg.scale_table);
    const size_t known = table.entries().size();
    rx.scale = table.get_or_compute(cfg.p, 0.5, cfg.scale_samples);
    if (!cfg.scale_table.empty() && table.entries().size() > known)
      table.save_file(cfg.scale_table);
  }
  apply_copy_policy(cfg, rx);
  return rx;
}

double AggregateReport::success_fraction() const {
  if (trials.empty()) return 0.0;
  uint64_t ok = 0;
  for (const TrialResult& t : trials) ok += t.success;
  return static_cast<double>(ok) / static_cast<double>(trials.size());
}

double AggregateReport::half_width() const {
  return binomial_half_width(success_fraction(), trials.size());
}

double AggregateReport::mean_max_rel_error() const {
  if (trials.empty()) return 0.0;
  double sum = 0.0;
  for (const TrialResult& t : trials) sum += t.max_rel_error;
  return sum / static_cast<double>(trials.size());
}

double AggregateReport::max_max_rel_error() const {
  double m = 0.0;
  for (const TrialResult& t : trials) m = std::max(m, t.max_rel_error);
  return m;
}

double AggregateReport::total_millis() const {
  double sum = 0.0;
  for (const TrialResult& t : trials) sum += t.millis;
  return sum;
}

std::string AggregateReport::csv() const {
  std::ostringstream out;
  out << "# trials " << trials.size() << "\n";
  out << "# copies " << copies << "\n";
  out << "# rows " << rows << "\n";
  out << "# f0 " << f0 << "\n";
  out << "# epochs " << epochs << "\n";
  out << "# success_fraction " << format_double(success_fraction()) << "\n";
  out << "# half_width " << format_double(half_width()) << "\n";
  out << "trial,success,max_rel_error,argmax_checkpoint,first_violation,epochs,skipped_zero\n";
  for (size_t t = 0; t < trials.size(); ++t) {
    const TrialResult& r = trials[t];
    out << t << ',' << (r.success ? 1 : 0) << ',' << format_double(r.max_rel_error) << ','
        << r.argmax_checkpoint << ',' << r.first_violation << ',' << r.epochs << ','
        << r.skipped_zero << '\n';
  }
  return out.str();
}

std::string AggregateReport::summary() const {
  std::ostringstream out;
  out << "trials=" << trials.size() << " success=" << format_double(success_fraction())
      << " +-" << format_double(half_width()) << " (3 sigma)"
      << " copies=" << copies;
  if (rows > 0) out << " rows=" << rows;
  out << " f0=" << f0 << " updates=" << total_updates << " epochs=" << epochs
      << " mean_max_err=" << format_double(mean_max_rel_error())
      << " max_max_err=" << format_double(max_max_rel_error())
      << " wall_ms=" << format_double(total_millis());
  return out.str();
}

AggregateReport run_experiment(const ExperimentConfig& cfg) {
  AggregateReport report = run_experiment_with(cfg, TrackerFactory{});
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot write report: " + cfg.out);
    out << report.csv();
  }
  return report;
}

CalibrationResult calibrate_constant(const ExperimentConfig& reference, double target) {
  return calibrate_constant_with(reference, target, TrackerFactory{});
}

std::vector<SweepRow> scaling_sweep(const ExperimentConfig& cfg,
                                    std::span<const uint64_t> lengths) {
  return scaling_sweep_with(cfg, lengths, TrackerFactory{});
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "m,l_min,l_naive\n";
  for (const SweepRow& r : rows) out << r.m << ',' << r.l_min << ',' << r.l_naive << '\n';
  return out.str();
}

}  // namespace fptrack
