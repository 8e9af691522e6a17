#include <benchmark/benchmark.h>

#include <vector>

#include <tfim/analysis.hpp>
#include <tfim/chain.hpp>
#include <tfim/echo.hpp>
#include <tfim/ed_oracle.hpp>

namespace {

void BM_LoschmidtEcho(benchmark::State& state) {
  const tfim::ChainSpec spec{static_cast<int>(state.range(0)), 1.0, 1.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tfim::loschmidt_echo_at(spec, 0.99, 0.01, 5.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) / 2);
}
BENCHMARK(BM_LoschmidtEcho)->Arg(200)->Arg(2000)->Arg(20000)->Arg(200000);

void BM_ScanCurve(benchmark::State& state) {
  const tfim::ChainSpec spec{2000, 1.0, 1.0, 1.0};
  std::vector<double> grid(2001);
  for (int i = 0; i < 2001; ++i) grid[i] = 4.0 * i / 2000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tfim::scan_curve(spec, 0.01, 2.0, 0.5, grid));
  }
}
BENCHMARK(BM_ScanCurve)->Unit(benchmark::kMillisecond);

void BM_HalfWidth(benchmark::State& state) {
  const tfim::ChainSpec spec{static_cast<int>(state.range(0)), 1.0, 1.0, 1.0};
  const double delta = 1.414 / std::sqrt(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tfim::half_width(spec, delta, 2.0, 5.0, 1.0));
  }
}
BENCHMARK(BM_HalfWidth)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_DenseEcho(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tfim::loschmidt_echo_ed(n, 1.5, 0.1, 0.5));
  }
}
BENCHMARK(BM_DenseEcho)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
