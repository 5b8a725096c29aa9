// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <limits>

#include "eepn/decomposition.hpp"
#include "eepn/dsp.hpp"
#include "eepn/fft.hpp"
#include "eepn/link.hpp"
#include "eepn/phase_noise.hpp"

using namespace eepn;

namespace {

void BM_SlidingRegression(benchmark::State& state) {
  const PhaseTrace t = gen_wiener(1 << 20, 150e3, 1e12, 1);
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sliding_regression(t, N));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(t.size()));
}
BENCHMARK(BM_SlidingRegression)->Arg(1000)->Arg(27230);

void BM_Fft(benchmark::State& state) {
  CVec x(static_cast<std::size_t>(state.range(0)), cplx{1.0, -0.5});
  for (auto _ : state) {
    fft_inplace(x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Fft)->Arg(4096)->Arg(54461)->Arg(1 << 20);

void BM_SimulateLink(benchmark::State& state) {
  LinkConfig c;
  c.num_symbols = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_link(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateLink)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  LinkConfig c;
  c.num_symbols = static_cast<std::size_t>(state.range(0));
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  const LinkInputs in = make_link_inputs(c);
  const WindowParams w = cd_memory(c);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(c, in, w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Decompose)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GenieTiming(benchmark::State& state) {
  LinkConfig c;
  c.num_symbols = 5000;
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  const LinkRun run = simulate_link(c);
  for (auto _ : state) benchmark::DoNotOptimize(genie_timing(run.tx_symbols.symbols, run.rx_symbols.symbols));
}
BENCHMARK(BM_GenieTiming)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
