#include <benchmark/benchmark.h>

#include "epcc/chart.hpp"
#include "epcc/sim_harness.hpp"

namespace {

using namespace epcc;

struct BenchFixture {
  FixedDesign design;
  ProfileFunction f;
  HistoricalBank bank;
  std::vector<ResponseVector> stream;
};

BenchFixture make_fixture(int n, int m, long steps) {
  Rng rng(8881);
  const auto f = table2_catalog()[3].first;  // quadratic in-control profile
  auto design = FixedDesign::random(n, 3, rng);
  std::vector<ResponseVector> history;
  for (int i = 0; i < m; ++i) history.push_back(generate_profile(f, design, 1.0, rng, 1 - m + i));
  auto bank = HistoricalBank::build(history);
  std::vector<ResponseVector> stream;
  for (long t = 1; t <= steps; ++t) stream.push_back(generate_profile(f, design, 1.0, rng, t));
  return BenchFixture{std::move(design), f, std::move(bank), std::move(stream)};
}

void BM_window_push(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  auto fix = make_fixture(n, std::max(w, 20), 4096);
  auto window = CorrelationWindow::init(fix.bank, w);
  std::size_t pos = 0;
  for (auto _ : state) {
    window.push(fix.stream[pos]);
    pos = (pos + 1) % fix.stream.size();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_window_push)->Args({10, 256})->Args({20, 512})->Args({40, 512});

void BM_substitute(benchmark::State& state) {
  const int w = 10;
  const int k1 = static_cast<int>(state.range(0));
  auto fix = make_fixture(256, 20, 64);
  auto window = CorrelationWindow::init(fix.bank, w);
  for (const auto& y : fix.stream) window.push(y);
  Rng rng(8882);
  for (auto _ : state) {
    const auto idx = sample_replacement_indices(window.time(), w, k1, fix.bank.m(), rng);
    benchmark::DoNotOptimize(substitute(window, fix.bank, k1, idx));
  }
}
BENCHMARK(BM_substitute)->Arg(1)->Arg(4)->Arg(9);

void BM_power_iteration(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const auto m = expected_correlation(0.7, 0.5, 0.3, w / 2, w - w / 2);
  const Eigen::VectorXd v_ref = Eigen::VectorXd::Constant(w, 1.0 / std::sqrt(double(w)));
  Rng rng(8883);
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_iteration_detector(m, v_ref, 1e-3, 10 * w + 100, rng));
  }
}
BENCHMARK(BM_power_iteration)->Arg(10)->Arg(20)->Arg(40);

// Runtime-comparison conditions: m = 20 historical profiles, w = 10,
// quadratic in-control profile.
void BM_monitor_step(benchmark::State& state) {
  auto fix = make_fixture(256, 20, 4096);
  ChartConfig config;
  config.w = 10;
  Chart chart(fix.bank, config, 1e9);
  std::size_t pos = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chart.step(fix.stream[pos]));
    pos = (pos + 1) % fix.stream.size();
  }
}
BENCHMARK(BM_monitor_step);

void BM_bootstrap_control_limit(benchmark::State& state) {
  auto fix = make_fixture(256, 20, 1);
  ChartConfig config;
  config.w = 10;
  config.n_bootstrap = static_cast<int>(state.range(0));
  config.n_pool = 5 * config.n_bootstrap;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_control_limit(fix.bank, config, 8884));
  }
}
BENCHMARK(BM_bootstrap_control_limit)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
