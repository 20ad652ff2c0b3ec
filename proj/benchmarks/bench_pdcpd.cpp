#include <benchmark/benchmark.h>

#include "pdcpd/ddcpd.hpp"
#include "pdcpd/featurizer.hpp"
#include "pdcpd/narx.hpp"
#include "pdcpd/pipeline.hpp"
#include "pdcpd/simkit.hpp"

namespace {

using namespace pdcpd;

const Scenario& scenario() {
  static const Scenario s = Scenario::defaults();
  return s;
}

const ArrivalTrace& day_trace() {
  static const ArrivalTrace trace =
      sample_arrivals(scenario().arrivals, scenario().horizon_min, 42);
  return trace;
}

void bm_simulate_day(benchmark::State& state) {
  const Scenario& s = scenario();
  for (auto _ : state) {
    EventLog log = simulate(day_trace(), s.true_schedule, s.service, 7);
    benchmark::DoNotOptimize(log.records.data());
  }
}
BENCHMARK(bm_simulate_day);

void bm_featurize_day(benchmark::State& state) {
  const Scenario& s = scenario();
  const EventLog log = simulate(day_trace(), s.true_schedule, s.service, 7);
  for (auto _ : state) {
    FeatureSeries f = snapshot_features(log, s.true_schedule, s.interval_min);
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(bm_featurize_day);

void bm_detect_fixed_144x6(benchmark::State& state) {
  const Scenario& s = scenario();
  const EventLog log = simulate(day_trace(), s.true_schedule, s.service, 7);
  const FeatureSeries f =
      snapshot_features(log, s.true_schedule, s.interval_min);
  for (auto _ : state) {
    auto cps = detect_fixed(f, CostStatistic::mean, 2);
    benchmark::DoNotOptimize(cps.data());
  }
}
BENCHMARK(bm_detect_fixed_144x6);

void bm_narx_train(benchmark::State& state) {
  const Scenario& s = scenario();
  const EventLog log = simulate(day_trace(), s.true_schedule, s.service, 7);
  const FeatureSeries f =
      snapshot_features(log, s.true_schedule, s.interval_min);
  const auto labels =
      schedule_level_series(s.true_schedule, s.horizon_min, s.interval_min);
  std::vector<double> y(labels.begin(), labels.end());
  NarxConfig cfg = s.narx;
  cfg.epochs = static_cast<int>(state.range(0));
  cfg.patience = cfg.epochs;  // time the full budget, no early stop
  for (auto _ : state) {
    NarxModel model = train(f, y, cfg, 11);
    benchmark::DoNotOptimize(model.w1.data());
  }
}
BENCHMARK(bm_narx_train)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
