// Graph state simulation engine.
//
// A simulation instance asks for a sample of single-qubit Pauli measurements
// on a graph state |G>, with an optional set of vertices postselected to
// fixed outcomes. The engine compiles a nice tree decomposition of G into a
// staged Clifford circuit whose gadgets mirror the decomposition nodes, runs
// the circuit lazily bottom-up (so only one bag's worth of qubits is ever
// live per node), and then repairs the raw outcome with a stabilizer of the
// circuit's output state so that the final sample has exactly the right
// conditional distribution.
#pragma once

#include "gsim/graph.hpp"
#include "gsim/tableau.hpp"
#include "gsim/treedecomp.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gsim {

// ---------------------------------------------------------------------------
// Instances

struct GssInstance {
  Graph graph;
  // One of 'X', 'Y', 'Z' per vertex.
  std::string bases;
  // Sorted list of postselected vertices; everything else is sampled.
  std::vector<size_t> postselected;
  // Desired outcome bit for postselected[i].
  BitVector target_outcomes;

  // {"graph": {...}, "bases": "XXYZ...", "postselect": {"3": 0, "7": 1}}
  // (the "postselect" key is optional).
  static GssInstance from_json(const std::string& text);
  std::string to_json() const;

  // Throws std::invalid_argument on malformed instances.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Gadget circuits

// One gadget, attached to the tree-decomposition node with the same index.
struct GadgetNode {
  TdKind kind = TdKind::None;
  std::vector<size_t> children;  // indices into GadgetCircuit::nodes

  // Live wires while this gadget runs: the children's surviving wires in
  // child order, followed by freshly introduced ones. Wire ids are final
  // qubit labels (data qubit for vertex v is v; ancillas count up from n).
  std::vector<size_t> wires;
  // Introduce: wires freshly allocated here, one per new bag vertex.
  std::vector<size_t> introduced;
  // Forget: CZ gates applied here, as wire pairs.
  std::vector<std::pair<size_t, size_t>> cz_edges;
  // Merge: CNOT (control, target) wire pairs; the target is the ancilla.
  std::vector<std::pair<size_t, size_t>> cnots;
  // Wires measured at this gadget (data wires at a Forget in the requested
  // bases, ancilla wires at a Merge in the Z basis).
  std::vector<size_t> measured;

  // wires minus measured, order preserved.
  std::vector<size_t> outputs() const;
};

struct GadgetCircuit {
  std::vector<GadgetNode> nodes;  // parallel to the decomposition's nodes
  size_t root = 0;
  size_t n_data = 0;
  size_t n_ancilla = 0;
  // Qubit id -> graph vertex it is a copy of.
  std::vector<size_t> wire_vertex;

  size_t num_qubits() const { return n_data + n_ancilla; }
  bool is_ancilla(size_t wire) const { return wire >= n_data; }
};

// Compiles a nice tree decomposition with an empty root bag into the staged
// circuit: Introduce nodes add |+> qubits for new bag vertices, Forget nodes
// apply the CZ of every graph edge incident to a leaving vertex (each edge
// exactly once) and measure the leaving copies, Merge nodes fuse the two
// copies of each shared vertex with a CNOT (control: second child's copy)
// and measure the first child's copy, which becomes an ancilla.
// Throws std::invalid_argument if the decomposition is invalid, not nice, or
// has a nonempty root bag.
GadgetCircuit build_circuit(const Graph& g, const TreeDecomposition& t);

// The graph G' on all circuit qubits such that running the circuit on
// |+...+> produces exactly |G'>. Its induced subgraph on the data qubits is
// G; every extra edge touches an ancilla.
Graph derive_gprime(const GadgetCircuit& c);

// Runs the circuit bottom-up, measuring data wires in the given per-vertex
// bases and ancillas in Z, holding only each gadget's live wires at a time.
// Returns one outcome bit per circuit qubit.
BitVector sample_subroutine(const GadgetCircuit& c, const std::string& bases,
                            Rng& rng);

// ---------------------------------------------------------------------------
// Correction

// A constraint pattern on n-qubit Paulis X^a Z^b: position q of x_part
// constrains a_q, position q of z_part constrains b_q; '*' leaves the
// coordinate free.
struct Pattern {
  std::string x_part, z_part;

  static Pattern all_free(size_t n) {
    return Pattern{std::string(n, '*'), std::string(n, '*')};
  }
  bool respected_by(const Pauli& p) const;
};

// The pattern that forces every ancilla outcome to 0 and every postselected
// vertex to its target: x fixed to y_i on ancillas and to y_v ^ m_v on
// postselected vertices, everything else free.
Pattern build_pattern(const GssInstance& inst, const GadgetCircuit& c,
                      const BitVector& y);

// Per-gadget record of the correction pass, for inspection in tests: the
// affine space of stabilizer (x|z)-components over the gadget's live wires
// (coordinates: x of wires[0..k-1], then z of wires[0..k-1]), the offset,
// and the gadget's local unitary used for back-substitution.
struct ChainEntry {
  std::vector<size_t> wires;
  BitMatrix basis;   // 2k x dim
  BitVector offset;  // 2k
  Tableau unitary;   // over the wires, identity for Introduce gadgets
};
using StabilizerChain = std::vector<ChainEntry>;

// Samples a uniformly random stabilizer of (U_bases (x) I) C |+...+> whose
// (x|z) components respect the pattern, by a bottom-up affine-subspace pass
// over the gadget tree followed by a top-down back-substitution. Returns
// nullopt when no such stabilizer exists (the postselected outcome has
// probability zero). Phases are canonical: the result is Hermitian with
// beta = 0. If `chain` is non-null it receives one entry per gadget.
std::optional<Pauli> correct_general(const GadgetCircuit& c,
                                     const std::string& bases,
                                     const Pattern& pattern, Rng& rng,
                                     StabilizerChain* chain = nullptr);

// Fast path when nothing is postselected: the stabilizer
// (U_bases (x) I) X^y Z^{A'y} (U_bases^dag (x) I) of the output state, which
// zeroes every ancilla coordinate of y. A' is the adjacency of gprime.
// O(|E| + n_t) work.
Pauli correct_simple(const Graph& gprime, const std::string& bases,
                     const BitVector& y);

// Multiplies a uniformly random product of the n graph-state generators
// (conjugated by the measurement bases) into the outcome z, making the
// sample uniform over the valid outcome set. O(n + |E|) work.
BitVector uniformize(BitVector z, const Graph& g, const std::string& bases,
                     Rng& rng);

// ---------------------------------------------------------------------------
// End-to-end solver

struct GssResult {
  // Outcome bits of the sampled (non-postselected) vertices, in vertex
  // order; empty when everything was postselected or on failure.
  std::string outcome;
  // Set when the requested postselection has probability zero.
  bool zero_probability = false;
};

// Full pipeline: normalize the decomposition (a trivial single-bag one if
// none is given), compile, sample, correct. With no postselection the
// simple correction plus uniformization is used; otherwise the general
// pattern-constrained correction runs and a zero-probability instance is
// flagged.
GssResult solve_instance(const GssInstance& inst,
                         const TreeDecomposition* td, Rng& rng);

// {"outcome": "0110...", "flag": null | "zero_probability"}
std::string result_to_json(const GssResult& r);

}  // namespace gsim
