// Planar and grid specializations: the end-to-end planar simulation
// pipeline, coarse-grained simulation of nearly planar graphs, three grid
// simulation algorithms of increasing cleverness, and a GF(2) solver for
// symmetric zero-diagonal (adjacency-matrix) linear systems built on the
// correction machinery.
#pragma once

#include "gsim/gss.hpp"
#include "gsim/treedecomp.hpp"

#include <optional>
#include <string>

namespace gsim {

// ---------------------------------------------------------------------------
// Grid simulation

struct GridSpec {
  size_t side = 0;
  // One of 'X', 'Y', 'Z' per cell; vertex (r, c) = r * side + c.
  std::string bases;

  void validate() const;  // throws std::invalid_argument
};

struct GridSample {
  BitVector outcomes;  // one bit per cell
  // Largest number of qubits ever held simultaneously.
  size_t peak_live_qubits = 0;
};

// Full-tableau preparation followed by sequential single-qubit measurement;
// peak live qubits = side^2.
GridSample grid_naive(const GridSpec& spec, Rng& rng);

// Left-to-right column sweep holding at most two columns at a time; peak
// live qubits <= 2 * side.
GridSample grid_sweep(const GridSpec& spec, Rng& rng);

// Divide and conquer: split the longer dimension into two halves, simulate
// each recursively keeping only its perimeter, join the halves with the CZ
// gates along the seam, and measure everything that left the perimeter.
// Rectangles with a side of at most 4 are prepared directly. Peak live
// qubits is O(side).
GridSample grid_recursive(const GridSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Planar pipelines

// Separator-based decomposition (compute_td) followed by solve_instance.
// Throws std::invalid_argument when the instance graph is not planar.
GssResult simulate_planar(const GssInstance& inst, Rng& rng);

// Simulation of a graph that coarse-grains onto a planar target: decompose
// the target, lift the decomposition through the preimage, and solve.
// Throws std::invalid_argument when the coarse-graining is invalid or the
// target is not planar.
GssResult simulate_coarse(const GssInstance& inst, const CoarseGraining& cg,
                          const Graph& planar_target, Rng& rng);

// ---------------------------------------------------------------------------
// GF(2) linear systems with symmetric zero-diagonal matrices

struct SymmetricSystem {
  BitMatrix a;  // symmetric, zero diagonal: an adjacency matrix
  BitVector b;

  void validate() const;  // throws std::invalid_argument
};

// Solves a x = b by sampling a pattern-constrained stabilizer of the gadget
// circuit for the graph of `a`: ancilla X-components forced to zero, data
// Z-components forced to b. Returns nullopt when the system is infeasible;
// otherwise the result is uniform over the solution set. Uses the given
// decomposition when provided, a trivial one otherwise.
std::optional<BitVector> solve_symmetric_f2(const SymmetricSystem& sys,
                                            const TreeDecomposition* td,
                                            Rng& rng);

// solve_symmetric_f2 with the separator-based decomposition of the graph of
// `a`; throws std::invalid_argument when that graph is not planar.
std::optional<BitVector> solve_planar_f2(const SymmetricSystem& sys, Rng& rng);

}  // namespace gsim
