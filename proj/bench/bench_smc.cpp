// Serial vs OpenMP SMC on the default plan's observational condition.

#include <benchmark/benchmark.h>

#include "ministan/harness.hpp"

namespace {

std::vector<ministan::ConditionSpec> dataset(std::size_t conditions) {
  ministan::ExperimentPlan plan = ministan::default_plan();
  plan.conditions.resize(conditions);
  plan.evidence_ladder.clear();
  return ministan::generate_data(plan, 1);
}

void run(benchmark::State& state, ministan::Execution exec) {
  auto data = dataset(static_cast<std::size_t>(state.range(1)));
  ministan::SMCConfig cfg;
  cfg.n_particles = static_cast<std::size_t>(state.range(0));
  cfg.execution = exec;
  for (auto _ : state) {
    auto particles = ministan::smc_infer(data, cfg);
    benchmark::DoNotOptimize(particles.data());
  }
  state.counters["threads"] =
      exec == ministan::Execution::parallel ? ministan::max_threads() : 1;
}

void BM_SmcSerial(benchmark::State& state) { run(state, ministan::Execution::serial); }
void BM_SmcParallel(benchmark::State& state) { run(state, ministan::Execution::parallel); }

void BM_OracleSerial(benchmark::State& state) {
  auto data = dataset(1);
  data[0].records.resize(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ministan::is_oracle(data, 20000, 1, ministan::Execution::serial));
  }
}

void BM_OracleParallel(benchmark::State& state) {
  auto data = dataset(1);
  data[0].records.resize(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ministan::is_oracle(data, 20000, 1, ministan::Execution::parallel));
  }
}

}  // namespace

BENCHMARK(BM_SmcSerial)->Args({1000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmcParallel)->Args({1000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
