#pragma once

#include <string>
#include <vector>

#include "gsim/f2la.hpp"
#include "gsim/graph.hpp"
#include "gsim/gss.hpp"
#include "gsim/tableau.hpp"
#include "gsim/treedecomp.hpp"

namespace gsim {

// One gate of a circuit description. Supported names: "H", "S", "Sdg", "X",
// "Y", "Z" (one qubit) and "CZ", "CNOT" (two qubits). Gates outside the
// {H, S, CZ} generating set are expanded internally.
struct CircuitGate {
  std::string g;
  std::vector<size_t> q;
};

// A Clifford circuit whose qubits sit at the vertices of a planar layout
// graph; every two-qubit gate must act along a layout edge.
struct CliffordCircuit {
  size_t n = 0;
  Graph layout;
  std::vector<CircuitGate> gates;

  // {"n": int, "layout_edges": [[u,v],...],
  //  "gates": [{"g":"H","q":[0]}, {"g":"CZ","q":[0,1]}, ...]}
  static CliffordCircuit from_json(const std::string& text);
  std::string to_json() const;

  // Throws std::invalid_argument on bad gate names, arities, qubit indices,
  // or a two-qubit gate off the layout.
  void validate() const;

  // Depth of the greedy layering of the gate list.
  size_t depth() const;
};

// Canonical form of a circuit: a graph state over n + h wires measured in
// per-wire X/Y bases. Wires 0..n-1 are the original qubit wires; each of the
// h teleportation ancillas gets a fresh wire. A sampled outcome string y
// over all wires yields the circuit outputs x_j = y[output_wire[j]] ^
// flip[output_wire[j]] and gadget bits z_j = y[gadget_wire[j]] ^
// flip[gadget_wire[j]]; the Pauli correction P(z) accumulated by the gadgets
// has X part push_x * z and Z part push_z * z.
struct ReducedInstance {
  GssInstance instance;                    // over G', no postselection
  CoarseGraining f;                        // wire -> qubit, r = max |A_j|
  std::vector<std::vector<size_t>> groups; // A_j, indexed by qubit j
  std::vector<bool> flip;                  // per wire
  std::vector<size_t> output_wire;         // per qubit
  std::vector<size_t> gadget_wire;         // per gadget, in z order
  size_t h = 0;                            // number of gadgets (ancillas)
  BitMatrix push_x, push_z;                // n x h
};

// Rewrites the circuit so it contains only CZ and S gates between an initial
// and a final Hadamard layer, teleporting every interior Hadamard onto a
// fresh ancilla wire. Guarantees |A_j| <= depth + 4 for all j.
ReducedInstance reduce_circuit(const CliffordCircuit& c);

// Exact output distribution of measuring C|0^n> in the computational basis;
// bit j of the outcome index is qubit j. Requires n <= 14.
std::vector<double> circuit_distribution(const CliffordCircuit& c);

// Samples the output distribution of C|0^n>, via reduce_circuit, a
// coarse-grained planar graph state simulation, the Pauli correction P(z),
// and a final uniformizing random stabilizer of U_C|0^n>. The constructor
// does the reduction and tree decomposition work once so repeated draws
// stay cheap. If g_out is given it receives the pre-uniformization string
// g, which always satisfies <g|U_C|0^n> != 0.
class CircuitSampler {
 public:
  explicit CircuitSampler(const CliffordCircuit& c);
  BitVector draw(Rng& rng, BitVector* g_out = nullptr);
  const ReducedInstance& reduced() const { return red_; }

 private:
  size_t n_;
  ReducedInstance red_;
  TreeDecomposition td_;  // of the reduced graph G'
  Tableau uc_;            // tableau of U_C
};

// One-shot convenience wrapper around CircuitSampler.
BitVector simulate_circuit(const CliffordCircuit& c, Rng& rng,
                           BitVector* g_out = nullptr);

}  // namespace gsim
