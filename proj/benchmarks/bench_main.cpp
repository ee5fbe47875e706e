#include <benchmark/benchmark.h>

#include <string>

#include "gsim/f2la.hpp"
#include "gsim/planar.hpp"
#include "gsim/tableau.hpp"

namespace {

gsim::GridSpec make_spec(size_t side, gsim::Rng& rng) {
  gsim::GridSpec spec{side, {}};
  spec.bases.reserve(side * side);
  for (size_t v = 0; v < side * side; ++v)
    spec.bases.push_back("XYZ"[rng() % 3]);
  return spec;
}

void bm_grid_naive(benchmark::State& state) {
  gsim::Rng rng(17);
  size_t side = size_t(state.range(0));
  size_t peak = 0;
  for (auto _ : state) {
    state.PauseTiming();
    gsim::GridSpec spec = make_spec(side, rng);
    state.ResumeTiming();
    gsim::GridSample s = gsim::grid_naive(spec, rng);
    peak = s.peak_live_qubits;
    benchmark::DoNotOptimize(s.outcomes);
  }
  state.counters["peak_live_qubits"] = double(peak);
}

void bm_grid_sweep(benchmark::State& state) {
  gsim::Rng rng(19);
  size_t side = size_t(state.range(0));
  size_t peak = 0;
  for (auto _ : state) {
    state.PauseTiming();
    gsim::GridSpec spec = make_spec(side, rng);
    state.ResumeTiming();
    gsim::GridSample s = gsim::grid_sweep(spec, rng);
    peak = s.peak_live_qubits;
    benchmark::DoNotOptimize(s.outcomes);
  }
  state.counters["peak_live_qubits"] = double(peak);
}

void bm_grid_recursive(benchmark::State& state) {
  gsim::Rng rng(23);
  size_t side = size_t(state.range(0));
  size_t peak = 0;
  for (auto _ : state) {
    state.PauseTiming();
    gsim::GridSpec spec = make_spec(side, rng);
    state.ResumeTiming();
    gsim::GridSample s = gsim::grid_recursive(spec, rng);
    peak = s.peak_live_qubits;
    benchmark::DoNotOptimize(s.outcomes);
  }
  state.counters["peak_live_qubits"] = double(peak);
}

void bm_mat_mul(benchmark::State& state) {
  gsim::Rng rng(29);
  size_t n = size_t(state.range(0));
  gsim::BitMatrix a = gsim::BitMatrix::random(n, n, rng);
  gsim::BitMatrix b = gsim::BitMatrix::random(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gsim::mat_mul(a, b));
}

void bm_tableau_compose(benchmark::State& state) {
  gsim::Rng rng(31);
  size_t n = size_t(state.range(0));
  gsim::Tableau t = gsim::Tableau::identity(n);
  for (size_t i = 0; i < 4 * n; ++i) {
    switch (rng() % 3) {
      case 0: apply_gate(t, gsim::Gate::H, {rng() % n}); break;
      case 1: apply_gate(t, gsim::Gate::S, {rng() % n}); break;
      default: {
        size_t a = rng() % n, b = rng() % n;
        if (a != b) apply_gate(t, gsim::Gate::CZ, {a, b});
      }
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(gsim::compose(t, t));
}

}  // namespace

BENCHMARK(bm_grid_naive)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Arg(96)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_grid_sweep)->Arg(8)->Arg(32)->Arg(128)->Arg(256)->Arg(512)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_grid_recursive)->Arg(8)->Arg(32)->Arg(128)->Arg(256)->Arg(512)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_mat_mul)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(bm_tableau_compose)->Arg(64)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
