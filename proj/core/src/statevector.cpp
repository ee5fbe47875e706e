#include "gsim/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace gsim {

namespace {
constexpr size_t kMaxQubits = 14;
using cplx = DenseState::cplx;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}  // namespace

DenseState::DenseState(size_t n) : n_(n), amp_(size_t(1) << n, cplx(0, 0)) {
  if (n > kMaxQubits) throw std::invalid_argument("DenseState: too many qubits");
  amp_[0] = 1.0;
}

DenseState DenseState::plus_state(size_t n) {
  DenseState s(n);
  double a = std::pow(kInvSqrt2, double(n));
  std::fill(s.amp_.begin(), s.amp_.end(), cplx(a, 0));
  return s;
}

void DenseState::apply(Gate g, const std::vector<size_t>& qubits) {
  if (qubits.size() != gate_arity(g))
    throw std::invalid_argument("DenseState::apply: wrong number of targets");
  for (size_t q : qubits)
    if (q >= n_) throw std::invalid_argument("DenseState::apply: qubit out of range");
  auto apply1 = [&](size_t q, cplx u00, cplx u01, cplx u10, cplx u11) {
    size_t bit = size_t(1) << q;
    for (size_t i = 0; i < amp_.size(); ++i) {
      if (i & bit) continue;
      cplx a0 = amp_[i], a1 = amp_[i | bit];
      amp_[i] = u00 * a0 + u01 * a1;
      amp_[i | bit] = u10 * a0 + u11 * a1;
    }
  };
  switch (g) {
    case Gate::H:
      apply1(qubits[0], kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2);
      break;
    case Gate::S:
      apply1(qubits[0], 1, 0, 0, cplx(0, 1));
      break;
    case Gate::X:
      apply1(qubits[0], 0, 1, 1, 0);
      break;
    case Gate::Z:
      apply1(qubits[0], 1, 0, 0, -1);
      break;
    case Gate::YBasisChange:
      // H S^dag = (1/sqrt2) [[1, -i], [1, i]]; maps Y-basis to Z-basis.
      apply1(qubits[0], kInvSqrt2, cplx(0, -kInvSqrt2), kInvSqrt2, cplx(0, kInvSqrt2));
      break;
    case Gate::CZ: {
      size_t m = (size_t(1) << qubits[0]) | (size_t(1) << qubits[1]);
      for (size_t i = 0; i < amp_.size(); ++i)
        if ((i & m) == m) amp_[i] = -amp_[i];
      break;
    }
    case Gate::CNOT: {
      size_t cb = size_t(1) << qubits[0], tb = size_t(1) << qubits[1];
      for (size_t i = 0; i < amp_.size(); ++i)
        if ((i & cb) && !(i & tb)) std::swap(amp_[i], amp_[i | tb]);
      break;
    }
  }
}

void DenseState::apply_pauli(const Pauli& p) {
  if (p.num_qubits() != n_) throw std::invalid_argument("apply_pauli: size mismatch");
  cplx phase(1, 0);
  if (p.alpha) phase *= cplx(0, 1);
  if (p.beta) phase = -phase;
  size_t xmask = 0, zmask = 0;
  for (size_t q = 0; q < n_; ++q) {
    if (p.x.get(q)) xmask |= size_t(1) << q;
    if (p.z.get(q)) zmask |= size_t(1) << q;
  }
  std::vector<cplx> out(amp_.size());
  for (size_t i = 0; i < amp_.size(); ++i) {
    cplx v = phase * amp_[i];
    if (std::popcount(i & zmask) & 1) v = -v;
    out[i ^ xmask] = v;
  }
  amp_ = std::move(out);
}

double DenseState::norm() const {
  double s = 0;
  for (const cplx& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

cplx DenseState::inner_product(const DenseState& o) const {
  if (n_ != o.n_) throw std::invalid_argument("inner_product: size mismatch");
  cplx s(0, 0);
  for (size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * o.amp_[i];
  return s;
}

bool DenseState::proportional_to(const DenseState& o, double tol) const {
  if (n_ != o.n_) return false;
  double na = norm(), nb = o.norm();
  if (na < tol || nb < tol) return na < tol && nb < tol;
  return std::abs(std::abs(inner_product(o)) - na * nb) < tol * na * nb;
}

double DenseState::outcome_probability(const std::vector<size_t>& qubits,
                                       const BitVector& bits) const {
  if (bits.size() != qubits.size())
    throw std::invalid_argument("outcome_probability: size mismatch");
  size_t mask = 0, want = 0;
  for (size_t i = 0; i < qubits.size(); ++i) {
    mask |= size_t(1) << qubits[i];
    if (bits.get(i)) want |= size_t(1) << qubits[i];
  }
  double p = 0;
  for (size_t i = 0; i < amp_.size(); ++i)
    if ((i & mask) == want) p += std::norm(amp_[i]);
  return p;
}

std::vector<double> DenseState::z_distribution(const std::vector<size_t>& qubits) const {
  std::vector<double> dist(size_t(1) << qubits.size(), 0.0);
  for (size_t i = 0; i < amp_.size(); ++i) {
    size_t key = 0;
    for (size_t j = 0; j < qubits.size(); ++j)
      if ((i >> qubits[j]) & 1) key |= size_t(1) << j;
    dist[key] += std::norm(amp_[i]);
  }
  return dist;
}

void DenseState::collapse(const std::vector<size_t>& qubits, const BitVector& bits) {
  double p = outcome_probability(qubits, bits);
  if (p < 1e-12) throw std::invalid_argument("collapse: zero-probability outcome");
  size_t mask = 0, want = 0;
  for (size_t i = 0; i < qubits.size(); ++i) {
    mask |= size_t(1) << qubits[i];
    if (bits.get(i)) want |= size_t(1) << qubits[i];
  }
  double scale = 1.0 / std::sqrt(p);
  for (size_t i = 0; i < amp_.size(); ++i)
    amp_[i] = ((i & mask) == want) ? amp_[i] * scale : cplx(0, 0);
}

DenseState graph_state(const BitMatrix& adjacency) {
  size_t n = adjacency.rows();
  if (adjacency.cols() != n || !adjacency.is_symmetric())
    throw std::invalid_argument("graph_state: bad adjacency matrix");
  DenseState s = DenseState::plus_state(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (adjacency.get(i, j)) s.apply(Gate::CZ, {i, j});
  return s;
}

DenseState state_of_tableau(const Tableau& t) {
  const size_t n = t.num_qubits();
  if (n > kMaxQubits) throw std::invalid_argument("state_of_tableau: too many qubits");
  // Project a basis state onto the joint +1 eigenspace of the stabilizers:
  // |psi> is proportional to prod_i (I + S_i)/2 |x> for any |x> with nonzero
  // overlap.
  for (size_t x = 0; x < (size_t(1) << n); ++x) {
    DenseState s(n);
    s.amplitudes().assign(size_t(1) << n, cplx(0, 0));
    s.amplitudes()[x] = 1.0;
    for (size_t i = 0; i < n; ++i) {
      DenseState flipped = s;
      flipped.apply_pauli(t.stabilizer(i));
      for (size_t k = 0; k < s.amplitudes().size(); ++k)
        s.amplitudes()[k] = 0.5 * (s.amplitudes()[k] + flipped.amplitudes()[k]);
    }
    double nm = s.norm();
    if (nm > 1e-9) {
      for (auto& a : s.amplitudes()) a /= nm;
      return s;
    }
  }
  throw std::logic_error("state_of_tableau: inconsistent stabilizer set");
}

}  // namespace gsim
