// Dense complex statevector simulation for small systems (<= 14 qubits).
// This is the reference oracle everything else is validated against, so it
// is written for clarity, not speed.
#pragma once

#include "gsim/tableau.hpp"

#include <complex>
#include <vector>

namespace gsim {

class DenseState {
 public:
  using cplx = std::complex<double>;

  // |0...0> on n qubits.
  explicit DenseState(size_t n);
  static DenseState plus_state(size_t n);

  size_t num_qubits() const { return n_; }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  std::vector<cplx>& amplitudes() { return amp_; }
  // Basis-state index convention: bit q of the index is qubit q.
  cplx amplitude(size_t index) const { return amp_[index]; }

  void apply(Gate g, const std::vector<size_t>& qubits);
  void apply_pauli(const Pauli& p);

  double norm() const;
  cplx inner_product(const DenseState& o) const;
  // True when the states agree up to a global phase.
  bool proportional_to(const DenseState& o, double tol = 1e-9) const;

  // Probability of seeing `bits` when Z-measuring `qubits`.
  double outcome_probability(const std::vector<size_t>& qubits,
                             const BitVector& bits) const;
  // Full Z-basis distribution over `qubits` (size 2^k, bit i of the index is
  // qubits[i]).
  std::vector<double> z_distribution(const std::vector<size_t>& qubits) const;
  // Projects onto the outcome and renormalizes; throws when the outcome has
  // probability ~0.
  void collapse(const std::vector<size_t>& qubits, const BitVector& bits);

 private:
  size_t n_;
  std::vector<cplx> amp_;
};

// |G> = prod CZ_{uv} |+>^n for the given symmetric adjacency matrix.
DenseState graph_state(const BitMatrix& adjacency);

// State prepared by a tableau, i.e. the unitary applied to |0...0>. Small n
// only: reconstructs the unitary column by column from stabilizers.
DenseState state_of_tableau(const Tableau& t);

}  // namespace gsim
