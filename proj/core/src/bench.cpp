#include "gsim/bench.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "gsim/planar.hpp"
#include "gsim/stats.hpp"

namespace gsim {

namespace {

uint64_t mix(uint64_t x) {
  // splitmix64 finalizer: decorrelates the per-trial seeds.
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

GridSample run_algo(const std::string& algo, const GridSpec& spec, Rng& rng) {
  if (algo == "naive") return grid_naive(spec, rng);
  if (algo == "sweep") return grid_sweep(spec, rng);
  if (algo == "recursive") return grid_recursive(spec, rng);
  throw std::invalid_argument("bench_grid: unknown algorithm " + algo);
}

}  // namespace

std::vector<BenchRow> bench_grid(const std::vector<size_t>& sides,
                                 const std::vector<std::string>& algos,
                                 size_t trials, uint64_t seed) {
  std::vector<BenchRow> rows;
  for (size_t ai = 0; ai < algos.size(); ++ai) {
    for (size_t side : sides) {
      for (size_t trial = 0; trial < trials; ++trial) {
        Rng rng(mix(seed ^ mix(ai) ^ mix(side) ^ mix(trial)));
        GridSpec spec{side, {}};
        spec.bases.reserve(side * side);
        for (size_t v = 0; v < side * side; ++v)
          spec.bases.push_back("XYZ"[rng() % 3]);
        auto start = std::chrono::steady_clock::now();
        GridSample sample = run_algo(algos[ai], spec, rng);
        std::chrono::duration<double> dt =
            std::chrono::steady_clock::now() - start;
        rows.push_back(
            {algos[ai], side, trial, dt.count(), sample.peak_live_qubits});
      }
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "algo,side,trial,seconds,peak_live_qubits\n";
  for (const BenchRow& r : rows)
    out << r.algo << ',' << r.side << ',' << r.trial << ',' << r.seconds << ','
        << r.peak_live_qubits << '\n';
  return out.str();
}

std::map<std::string, double> bench_slopes(const std::vector<BenchRow>& rows) {
  // Mean seconds per (algo, side), then a log-log fit per algo.
  std::map<std::string, std::map<size_t, std::pair<double, size_t>>> acc;
  for (const BenchRow& r : rows) {
    auto& cell = acc[r.algo][r.side];
    cell.first += r.seconds;
    cell.second += 1;
  }
  std::map<std::string, double> slopes;
  for (const auto& [algo, by_side] : acc) {
    std::vector<double> lx, ly;
    for (const auto& [side, cell] : by_side) {
      lx.push_back(std::log(double(side)));
      ly.push_back(std::log(cell.first / double(cell.second)));
    }
    slopes[algo] = fit_slope(lx, ly);
  }
  return slopes;
}

}  // namespace gsim
