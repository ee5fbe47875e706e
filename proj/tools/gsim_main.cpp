#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gsim/bench.hpp"
#include "gsim/circuit.hpp"
#include "gsim/gss.hpp"
#include "gsim/planar.hpp"
#include "gsim/treedecomp.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
}

// "2:512:*2" (geometric), "2:10:+2" (arithmetic), or a comma list "4,8,16".
std::vector<size_t> parse_sides(const std::string& s) {
  std::vector<size_t> sides;
  if (s.find(':') != std::string::npos) {
    std::istringstream in(s);
    std::string lo_s, hi_s, step_s;
    std::getline(in, lo_s, ':');
    std::getline(in, hi_s, ':');
    std::getline(in, step_s);
    size_t lo = std::stoull(lo_s), hi = std::stoull(hi_s);
    if (step_s.empty()) step_s = "*2";
    size_t step = std::stoull(step_s.substr(1));
    if (step < (step_s[0] == '*' ? 2u : 1u))
      throw CLI::ValidationError("bad side step " + step_s);
    for (size_t side = lo; side <= hi;
         side = step_s[0] == '*' ? side * step : side + step)
      sides.push_back(side);
  } else {
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) sides.push_back(std::stoull(tok));
  }
  if (sides.empty()) throw CLI::ValidationError("no sides given");
  return sides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar graph state and Clifford circuit sampler"};
  app.require_subcommand(1);

  // --- sample -------------------------------------------------------------
  auto* sample = app.add_subcommand(
      "sample", "Sample Pauli measurements of a graph state");
  std::string graph_path, bases, postselect_path;
  uint64_t seed = 1;
  size_t repeats = 1;
  sample->add_option("--graph", graph_path, "graph JSON file")->required();
  sample->add_option("--bases", bases, "per-vertex bases, e.g. XYZX")->required();
  sample->add_option("--postselect", postselect_path,
                     "JSON file {\"vertex\": bit, ...}");
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--repeats", repeats, "number of samples");
  sample->callback([&] {
    std::string post = postselect_path.empty() ? "{}" : read_file(postselect_path);
    gsim::GssInstance inst = gsim::GssInstance::from_json(
        std::string("{\"graph\":") + read_file(graph_path) +
        ",\"bases\":\"" + bases + "\",\"postselect\":" + post + "}");
    gsim::Rng rng(seed);
    for (size_t i = 0; i < repeats; ++i) {
      gsim::GssResult res =
          gsim::is_planar(inst.graph)
              ? gsim::simulate_planar(inst, rng)
              : gsim::solve_instance(inst, nullptr, rng);
      std::cout << gsim::result_to_json(res) << "\n";
    }
  });

  // --- grid ---------------------------------------------------------------
  auto* grid = app.add_subcommand("grid", "Time grid sampling runs");
  size_t side = 2, trials = 7;
  std::string algo = "recursive", csv_path;
  grid->add_option("--side", side, "grid side length")->required();
  grid->add_option("--algo", algo, "naive|sweep|recursive")
      ->check(CLI::IsMember({"naive", "sweep", "recursive"}));
  grid->add_option("--trials", trials, "trials with fresh random bases");
  grid->add_option("--seed", seed, "RNG seed");
  grid->add_option("--csv", csv_path, "write CSV here instead of stdout");
  grid->callback([&] {
    write_output(csv_path,
                 gsim::bench_csv(gsim::bench_grid({side}, {algo}, trials, seed)));
  });

  // --- circuit ------------------------------------------------------------
  auto* circuit = app.add_subcommand(
      "circuit", "Sample the output of a planar-layout Clifford circuit");
  std::string circuit_path;
  circuit->add_option("--file", circuit_path, "circuit JSON file")->required();
  circuit->add_option("--seed", seed, "RNG seed");
  circuit->add_option("--repeats", repeats, "number of samples");
  circuit->callback([&] {
    gsim::CliffordCircuit c =
        gsim::CliffordCircuit::from_json(read_file(circuit_path));
    gsim::Rng rng(seed);
    for (size_t i = 0; i < repeats; ++i)
      std::cout << gsim::simulate_circuit(c, rng).to_string() << "\n";
  });

  // --- solve --------------------------------------------------------------
  auto* solve = app.add_subcommand(
      "solve", "Sample a uniform solution of A x = b over GF(2)");
  std::string matrix_path, rhs_path;
  solve->add_option("--matrix", matrix_path,
                    "symmetric zero-diagonal matrix, \"rows cols\" header "
                    "then 0/1 rows")
      ->required();
  solve->add_option("--rhs", rhs_path, "file with the 0/1 right-hand side")
      ->required();
  solve->add_option("--seed", seed, "RNG seed");
  solve->callback([&] {
    gsim::SymmetricSystem sys;
    sys.a = gsim::BitMatrix::parse(read_file(matrix_path));
    std::istringstream rhs(read_file(rhs_path));
    std::string bits;
    rhs >> bits;
    sys.b = gsim::BitVector::parse(bits);
    gsim::Rng rng(seed);
    gsim::Graph g(sys.a.rows());
    for (size_t u = 0; u < sys.a.rows(); ++u)
      for (size_t v = u + 1; v < sys.a.cols(); ++v)
        if (sys.a.get(u, v)) g.add_edge(u, v);
    auto x = gsim::is_planar(g) ? gsim::solve_planar_f2(sys, rng)
                                : gsim::solve_symmetric_f2(sys, nullptr, rng);
    std::cout << (x ? x->to_string() : std::string("INFEASIBLE")) << "\n";
  });

  // --- bench --------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Grid scaling benchmark");
  std::string sides_spec = "2:512:*2", algos_spec = "all";
  bench->add_option("--sides", sides_spec,
                    "lo:hi:*k geometric, lo:hi:+k arithmetic, or a,b,c");
  bench->add_option("--algos", algos_spec, "all or comma list");
  bench->add_option("--trials", trials, "trials per (algo, side)");
  bench->add_option("--seed", seed, "RNG seed");
  bench->add_option("--csv", csv_path, "write CSV here instead of stdout");
  bench->callback([&] {
    std::vector<std::string> algos;
    if (algos_spec == "all") {
      algos = {"naive", "sweep", "recursive"};
    } else {
      std::istringstream in(algos_spec);
      std::string tok;
      while (std::getline(in, tok, ',')) algos.push_back(tok);
    }
    std::vector<gsim::BenchRow> rows =
        gsim::bench_grid(parse_sides(sides_spec), algos, trials, seed);
    write_output(csv_path, gsim::bench_csv(rows));
    if (parse_sides(sides_spec).size() >= 2)
      for (const auto& [name, slope] : gsim::bench_slopes(rows))
        std::cerr << "slope " << name << " " << slope << "\n";
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
