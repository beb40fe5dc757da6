// track: streaming frequency-moment experiment runner.
//
//   track run --config <file>            multi-trial tracking experiment
//   track calibrate --config <file>      find the smallest constant C on the grid
//   track sweep --config <file>          minimal copies vs stream length
//   track gen --family <f> --out <file>  write a stream file (+ checkpoints)
//   track ball-stability ...             neighborhood stability experiment
//
// Exit codes: 0 success, 1 acceptance threshold missed, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fptrack/harness.hpp"

using namespace fptrack;

namespace {

int cmd_run(const std::string& config_path) {
  const ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  const AggregateReport report = run_experiment(cfg);
  std::cout << report.summary() << "\n";
  if (!cfg.out.empty()) std::cout << "per-trial csv: " << cfg.out << "\n";
  if (cfg.min_success >= 0.0 && report.success_fraction() < cfg.min_success) {
    std::cout << "below min_success " << format_double(cfg.min_success) << "\n";
    return 1;
  }
  return 0;
}

int cmd_calibrate(const std::string& config_path, double target, bool write) {
  const ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  const CalibrationResult result = calibrate_constant(cfg, target);
  for (const auto& [C, success] : result.probes)
    std::cout << "C=" << format_double(C) << " success=" << format_double(success) << "\n";
  if (!result.met) {
    std::cout << "calibration failed: best C=" << format_double(result.constant)
              << " success=" << format_double(result.success) << " < target "
              << format_double(target) << "\n";
    return 1;
  }
  std::cout << "calibrated C=" << format_double(result.constant)
            << " success=" << format_double(result.success) << " (trials=" << cfg.trials
            << ")\n";
  if (write) {
    // Rewrite the C line of the config in place.
    std::ifstream in(config_path);
    std::ostringstream body;
    std::string line;
    bool replaced = false;
    while (std::getline(in, line)) {
      if (line.rfind("C ", 0) == 0) {
        body << "C " << format_double(result.constant) << "\n";
        replaced = true;
      } else {
        body << line << "\n";
      }
    }
    if (!replaced) body << "C " << format_double(result.constant) << "\n";
    in.close();
    std::ofstream out(config_path);
    out << body.str();
    std::cout << "wrote C to " << config_path << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& lengths,
              const std::string& out_path) {
  const ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  std::vector<uint64_t> ms;
  for (const std::string& s : lengths) ms.push_back(static_cast<uint64_t>(std::stod(s)));
  const auto rows = scaling_sweep(cfg, ms);
  const std::string csv = sweep_csv(rows);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << csv;
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_gen(const std::string& family, const std::string& out_path, uint64_t n, uint64_t m,
            double skew, double p, uint32_t positions, uint32_t players, uint64_t seed) {
  GeneratedStream stream;
  if (family == "zipf") {
    stream = gen_zipf(n, m, skew, seed);
  } else if (family == "uniform") {
    stream = gen_uniform(n, m, seed);
  } else if (family == "cash-hard") {
    stream = gen_cash_hard(hard_params(p, HardFamily::CashRegister),
                           CashHardInput::random(positions, players, seed));
  } else if (family == "turnstile-hard") {
    stream = gen_turnstile_hard(hard_params(p, HardFamily::Turnstile),
                                TurnstileHardInput::random(positions, players, seed));
  } else {
    std::cerr << "unknown family: " << family << "\n";
    return 2;
  }
  save_stream_file(out_path, stream.data());
  std::cout << "wrote " << stream.events.size() << " events to " << out_path << "\n";
  if (!stream.checkpoints.empty()) {
    const std::string side = out_path + ".ckpt";
    std::ofstream out(side);
    if (!out) throw std::runtime_error("cannot write " + side);
    write_checkpoints(out, stream.checkpoints);
    std::cout << "wrote " << stream.checkpoints.size() << " checkpoints to " << side << "\n";
  }
  return 0;
}

int cmd_ball(size_t dim, double eps, double radius_coeff, uint32_t trials,
             uint32_t samples, uint64_t seed, double min_prob, int threads) {
  std::vector<double> center(dim);
  Rng rng(mix64(seed, seed_role::kStream));
  for (auto& v : center) v = rng.uniform01() + 0.5;
  const auto result =
      ball_stability_experiment(center, eps, radius_coeff, trials, samples, seed, threads);
  std::cout << "trials=" << result.trials << " successes=" << result.successes
            << " probability=" << format_double(result.probability)
            << " radius=" << format_double(result.radius) << " buckets=" << result.buckets
            << "\n";
  if (min_prob >= 0.0 && result.probability < min_prob) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming frequency-moment tracking harness"};
  app.require_subcommand(1);

  std::string config_path, out_path, family = "zipf";
  double target = 0.9, skew = 1.1, p = 2.0, eps = 0.25, radius_coeff = 0.1;
  double min_prob = -1.0;
  bool write_config = false;
  uint64_t n = 1024, m = 100000, seed = 42;
  uint32_t positions = 8, players = 4, trials = 500, samples = 200;
  size_t dim = 16;
  int threads = 0;
  std::vector<std::string> lengths;

  auto* run = app.add_subcommand("run", "run a tracking experiment");
  run->add_option("--config", config_path, "experiment config file")->required();

  auto* calibrate = app.add_subcommand("calibrate", "calibrate the copy-count constant");
  calibrate->add_option("--config", config_path, "reference config file")->required();
  calibrate->add_option("--target", target, "target all-times success fraction");
  calibrate->add_flag("--write", write_config, "write the calibrated C back to the config");

  auto* sweep = app.add_subcommand("sweep", "minimal copies vs stream length");
  sweep->add_option("--config", config_path, "experiment config file")->required();
  sweep->add_option("--lengths", lengths, "stream lengths, e.g. 1e3,1e4,1e5,1e6")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_path, "CSV output path (stdout when absent)");

  auto* gen = app.add_subcommand("gen", "generate a stream file");
  gen->add_option("--family", family, "zipf|uniform|cash-hard|turnstile-hard")->required();
  gen->add_option("--out", out_path, "stream file path")->required();
  gen->add_option("--n", n, "universe size (zipf/uniform)");
  gen->add_option("--m", m, "stream length (zipf/uniform)");
  gen->add_option("--skew", skew, "zipf skew");
  gen->add_option("--p", p, "moment order (hard families)");
  gen->add_option("--N", positions, "positions (hard families)");
  gen->add_option("--players", players, "players/phases (hard families)");
  gen->add_option("--seed", seed, "generator seed");

  auto* ball = app.add_subcommand("ball-stability", "neighborhood stability experiment");
  ball->add_option("--dim", dim, "center dimension");
  ball->add_option("--eps", eps, "relative accuracy");
  ball->add_option("--radius-coeff", radius_coeff, "radius coefficient");
  ball->add_option("--trials", trials, "hash-seed trials");
  ball->add_option("--samples", samples, "points sampled per ball");
  ball->add_option("--seed", seed, "experiment seed");
  ball->add_option("--min-prob", min_prob, "exit 1 below this probability");
  ball->add_option("--threads", threads, "0 = default pool, 1 = serial");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (calibrate->parsed()) return cmd_calibrate(config_path, target, write_config);
    if (sweep->parsed()) return cmd_sweep(config_path, lengths, out_path);
    if (gen->parsed())
      return cmd_gen(family, out_path, n, m, skew, p, positions, players, seed);
    if (ball->parsed())
      return cmd_ball(dim, eps, radius_coeff, trials, samples, seed, min_prob, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
