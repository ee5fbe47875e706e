#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gsim {

struct BenchRow {
  std::string algo;  // "naive", "sweep", or "recursive"
  size_t side = 0;
  size_t trial = 0;
  double seconds = 0.0;
  size_t peak_live_qubits = 0;
};

// Times grid sampling runs with random bases. Trial seeds are derived from
// `seed`, the algorithm, the side, and the trial index, so everything except
// the seconds column is reproducible. Timing excludes input generation.
std::vector<BenchRow> bench_grid(const std::vector<size_t>& sides,
                                 const std::vector<std::string>& algos,
                                 size_t trials, uint64_t seed);

// "algo,side,trial,seconds,peak_live_qubits" header plus one line per row.
std::string bench_csv(const std::vector<BenchRow>& rows);

// Least-squares slope of log(mean seconds) against log(side), per algorithm.
std::map<std::string, double> bench_slopes(const std::vector<BenchRow>& rows);

}  // namespace gsim
