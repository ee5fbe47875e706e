// Stabilizer tableaus with explicit phase bookkeeping.
//
// A Pauli operator on n qubits is written i^alpha (-1)^beta X^a Z^b with
// a, b in GF(2)^n. A Clifford unitary Q is represented by a triple (M, p, s):
// M is the 2n x 2n binary matrix whose row i < n is the (a|b) image of X_i
// under conjugation by Q and whose row n+i is the image of Z_i; p and s hold
// the i^p (-1)^s phases of those images. M is symplectic, M^T Omega M =
// Omega with Omega = [[0,I],[I,0]], and p is determined by M through
// p = diag(M Lambda M^T) with Lambda = [[0,I],[0,0]].
//
// A stabilizer state is the tableau of a unitary applied to |0...0>: rows
// n..2n-1 generate the stabilizer group, rows 0..n-1 are the matching
// destabilizers.
#pragma once

#include "gsim/f2la.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gsim {

// ---------------------------------------------------------------------------
// Pauli operators

struct Pauli {
  bool alpha = false;  // i^alpha
  bool beta = false;   // (-1)^beta
  BitVector x, z;      // length n each

  explicit Pauli(size_t n = 0) : x(n), z(n) {}
  Pauli(bool a, bool b, BitVector xs, BitVector zs)
      : alpha(a), beta(b), x(std::move(xs)), z(std::move(zs)) {}

  size_t num_qubits() const { return x.size(); }
  bool is_identity() const { return !alpha && !beta && x.is_zero() && z.is_zero(); }
  // Hermitian iff alpha == x . z (then the +-1 eigenvalue sign is beta).
  bool is_hermitian() const { return alpha == x.dot(z); }

  // Single-qubit X/Y/Z at position q (Y = i XZ).
  static Pauli single(size_t n, size_t q, char which);

  bool commutes_with(const Pauli& o) const;
  bool operator==(const Pauli& o) const {
    return alpha == o.alpha && beta == o.beta && x == o.x && z == o.z;
  }
  std::string to_string() const;  // e.g. "+XIZY", "-iXX"
};

Pauli pauli_mul(const Pauli& p1, const Pauli& p2);

// A block of k Paulis sharing the (alpha, beta, row) layout: row i of `rows`
// is (a_i | b_i), 2n wide.
struct PauliBlock {
  BitMatrix rows;
  BitVector alpha, beta;

  PauliBlock() = default;
  PauliBlock(size_t k, size_t n) : rows(k, 2 * n), alpha(k), beta(k) {}
  PauliBlock(BitMatrix r, BitVector a, BitVector b)
      : rows(std::move(r)), alpha(std::move(a)), beta(std::move(b)) {}
  size_t size() const { return rows.rows(); }
  Pauli pauli(size_t i) const;
  void set_pauli(size_t i, const Pauli& p);
};

// Replaces the block by T * block: output row i is the ordered product of
// the input Paulis selected by row i of T (k_out x k_in).
PauliBlock multiply_block(const BitMatrix& t, const PauliBlock& in);

// diag(A * lower(X Z^T) * A^T) over GF(2), where lower() keeps the strictly
// lower triangular part. Computed recursively by halving the inner dimension
// so the m x m product X Z^T is never materialized.
BitVector diag_lower_outer(const BitMatrix& a, const BitMatrix& x, const BitMatrix& z);

// ---------------------------------------------------------------------------
// Gates

enum class Gate { H, S, X, Z, CZ, CNOT, YBasisChange };

// Number of qubits the gate acts on (1 or 2).
size_t gate_arity(Gate g);
const char* gate_name(Gate g);
std::optional<Gate> gate_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Tableau

class Tableau {
 public:
  Tableau() = default;
  // Identity unitary on n qubits; as a state, |0...0>.
  explicit Tableau(size_t n);

  static Tableau identity(size_t n) { return Tableau(n); }
  // Tableau of the named gate (1 or 2 qubits). For CNOT the first qubit is
  // the control.
  static Tableau for_gate(Gate g);
  // H^{x n}: as a state, |+...+>.
  static Tableau plus_state(size_t n);

  size_t num_qubits() const { return n_; }
  const BitMatrix& m() const { return m_; }
  const BitVector& p() const { return p_; }
  const BitVector& s() const { return s_; }

  // Row i < n is the image of X_i (destabilizer), row n+i of Z_i (stabilizer).
  Pauli row_pauli(size_t row) const;
  Pauli destabilizer(size_t i) const { return row_pauli(i); }
  Pauli stabilizer(size_t i) const { return row_pauli(n_ + i); }

  // Image of an arbitrary Pauli under conjugation, Q P Q^dagger.
  friend Pauli conjugate_pauli(const Tableau& t, const Pauli& in);
  friend PauliBlock conjugate_many(const Tableau& t, const PauliBlock& in);

  // True iff the symplectic and phase invariants hold.
  bool check_invariants() const;

  friend Tableau compose(const Tableau& t1, const Tableau& t2, size_t start_qubit);
  friend Tableau compose_on_qubits(const Tableau& t1, const Tableau& t2,
                                   const std::vector<size_t>& qubits);
  friend Tableau tensor(const Tableau& t1, const Tableau& t2);
  friend void apply_gate(Tableau& t, Gate g, const std::vector<size_t>& qubits);
  friend void apply_cz_batch(Tableau& t, const BitMatrix& adjacency);

 private:
  size_t n_ = 0;
  BitMatrix m_;   // 2n x 2n
  BitVector p_;   // length 2n
  BitVector s_;   // length 2n

  friend class TableauMeasurer;
  friend class SequentialMeasurer;
  friend void rotate_bases(Tableau& t, const std::string& bases);
};

// Tableau of Q2 Q1 (first t1, then t2). If t2 is smaller than t1 it is
// understood as acting on the contiguous qubits [start_qubit,
// start_qubit + t2.num_qubits()) and the composition avoids the full-size
// product.
Tableau compose(const Tableau& t1, const Tableau& t2, size_t start_qubit = 0);

// Composition with a small tableau acting on an explicit, strictly
// increasing list of qubits; O(n m^2) instead of a full-size product.
Tableau compose_on_qubits(const Tableau& t1, const Tableau& t2,
                          const std::vector<size_t>& qubits);

Tableau tensor(const Tableau& t1, const Tableau& t2);

// t <- gate * t. `qubits` lists the gate's targets (control first for CNOT).
void apply_gate(Tableau& t, Gate g, const std::vector<size_t>& qubits);

// Applies CZ on every pair {i, j} with adjacency[i][j] = 1 in one sweep.
// The adjacency matrix must be symmetric with zero diagonal.
void apply_cz_batch(Tableau& t, const BitMatrix& adjacency);

// ---------------------------------------------------------------------------
// Measurement

enum class MeasureMode { Sample, Postselect };

struct MeasurementResult {
  // One bit per measured qubit, in the caller's qubit order.
  BitVector outcomes;
  // Postselection asked for an outcome of probability zero. When set, the
  // tableau is left unchanged and `outcomes` is meaningless.
  bool zero_probability = false;
};

// Measures the listed qubits in the Z basis and removes them from the
// tableau (t shrinks by qubits.size(); the surviving qubits keep their
// relative order). In Postselect mode `desired` gives the wanted bit per
// listed qubit; in Sample mode random outcomes are drawn from `rng`.
MeasurementResult measure_z_subset(Tableau& t, const std::vector<size_t>& qubits,
                                   MeasureMode mode, Rng& rng,
                                   const BitVector* desired = nullptr);

// Basis-aware wrapper: bases[i] in {'X','Y','Z'} selects the measurement
// basis of qubits[i]; the basis rotation is applied, then measure_z_subset.
MeasurementResult measure_bases(Tableau& t, const std::vector<size_t>& qubits,
                                const std::string& bases, MeasureMode mode, Rng& rng,
                                const BitVector* desired = nullptr);

// Measures every qubit: first postselects the qubits listed in `postselect`
// (qubit -> desired bit pairs) then samples the rest. bases has length
// t.num_qubits(). Returns outcomes in qubit order, or zero_probability.
MeasurementResult sample_with_postselection(
    Tableau& t, const std::string& bases,
    const std::vector<std::pair<size_t, bool>>& postselect, Rng& rng);

// Aaronson-Gottesman style single-qubit Z measurement; the qubit stays in
// the tableau (collapsed). Used as an independent in-tree oracle for
// measure_z_subset and SequentialMeasurer.
std::optional<bool> measure_z_single(Tableau& t, size_t qubit, MeasureMode mode,
                                     Rng& rng, bool desired = false);

// Applies the measurement-basis rotation of every qubit at once (H for 'X',
// the Y-basis change for 'Y', nothing for 'Z') in one row-major pass over
// the tableau. Equivalent to the corresponding apply_gate loop but avoids
// its per-gate column traversals.
void rotate_bases(Tableau& t, const std::string& bases);

// Sequential single-qubit Z measurements on one tableau, behaviorally
// identical to repeated measure_z_single calls (same outcomes from the same
// RNG stream, same final tableau). Maintains an index of each qubit
// column's X support so a measurement touches only the rows that
// anticommute with Z_q instead of scanning a full matrix column; this is
// what makes the naive grid algorithm's n sequential measurements
// affordable at large n.
class SequentialMeasurer {
 public:
  explicit SequentialMeasurer(Tableau& t);
  std::optional<bool> measure(size_t qubit, MeasureMode mode, Rng& rng,
                              bool desired = false);

 private:
  Tableau& t_;
  size_t n_;
  BitMatrix xt_;  // n x 2n; row q bit h = X bit on qubit q of tableau row h
  // Nonzero word ranges [lo, hi) of each tableau row, split into the X half
  // and the Z half.  Maintained as upper bounds so a measurement only
  // touches words the pivot row can actually occupy.  The split form needs
  // the qubit count to be a multiple of 64; otherwise the ranges cover the
  // whole row and updates stay full-width.
  bool aligned_ = false;
  size_t xw_ = 0;
  std::vector<std::pair<uint32_t, uint32_t>> xspan_, zspan_;
};

}  // namespace gsim
