// Throughput benchmarks: sketch update kernels, and the trial pool in its
// serial reference configuration vs the OpenMP path (threads = 0). On a
// single-core host the two coincide; with more cores the parallel run
// scales while producing byte-identical reports.

#include <benchmark/benchmark.h>

#include "fptrack/harness.hpp"

using namespace fptrack;

namespace {

ExperimentConfig bench_config() {
  ExperimentConfig cfg;
  cfg.stream = StreamSpec::Zipf;
  cfg.n = 1 << 10;
  cfg.m = 20000;
  cfg.skew = 1.1;
  cfg.p = 2.0;
  cfg.eps = 0.25;
  cfg.sketch = SketchKind::Ams;
  cfg.copies = CopyPolicy::Theorem1;
  cfg.C = 1.0;
  cfg.trials = 16;
  cfg.seed = 42;
  return cfg;
}

void BM_AmsUpdate(benchmark::State& state) {
  const auto stream = gen_zipf(1 << 10, 100000, 1.1, 3).events;
  AmsSketch sketch(1 << 10, 256, 7);
  size_t i = 0;
  for (auto _ : state) {
    sketch.update(stream[i].item, 1);
    if (++i == stream.size()) i = 0;
  }
  benchmark::DoNotOptimize(sketch.estimate());
}

void BM_StableUpdate(benchmark::State& state) {
  const auto stream = gen_zipf(1 << 10, 100000, 1.1, 3).events;
  StableSketch sketch(1 << 10, static_cast<size_t>(state.range(0)), 1.5, 0.96996, 7);
  size_t i = 0;
  for (auto _ : state) {
    sketch.update(stream[i].item, 1);
    if (++i == stream.size()) i = 0;
  }
  benchmark::DoNotOptimize(sketch.estimate());
}

void BM_TrackerEstimate(benchmark::State& state) {
  Tracker t = Tracker::ams(1 << 10, static_cast<size_t>(state.range(0)), 256, 11);
  const auto stream = gen_zipf(1 << 10, 1000, 1.1, 3).events;
  for (const StreamEvent& e : stream) t.update(e);
  for (auto _ : state) benchmark::DoNotOptimize(t.estimate());
}

void BM_RunExperimentSerial(benchmark::State& state) {
  ExperimentConfig cfg = bench_config();
  cfg.threads = 1;  // serial reference path
  const ResolvedExperiment rx = resolve_experiment(cfg);
  for (auto _ : state) {
    const auto report = run_resolved_with(cfg, rx, TrackerFactory{});
    benchmark::DoNotOptimize(report.trials.size());
  }
}

void BM_RunExperimentParallel(benchmark::State& state) {
  ExperimentConfig cfg = bench_config();
  cfg.threads = 0;  // OpenMP pool
  const ResolvedExperiment rx = resolve_experiment(cfg);
  for (auto _ : state) {
    const auto report = run_resolved_with(cfg, rx, TrackerFactory{});
    benchmark::DoNotOptimize(report.trials.size());
  }
}

void BM_BallStabilitySerial(benchmark::State& state) {
  const std::vector<double> center(16, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ball_stability_experiment(center, 0.25, 0.1, 50, 50, 9, /*threads=*/1).successes);
}

void BM_BallStabilityParallel(benchmark::State& state) {
  const std::vector<double> center(16, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ball_stability_experiment(center, 0.25, 0.1, 50, 50, 9, /*threads=*/0).successes);
}

}  // namespace

BENCHMARK(BM_AmsUpdate);
BENCHMARK(BM_StableUpdate)->Arg(64)->Arg(256);
BENCHMARK(BM_TrackerEstimate)->Arg(5)->Arg(17);
BENCHMARK(BM_RunExperimentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunExperimentParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallStabilitySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallStabilityParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
