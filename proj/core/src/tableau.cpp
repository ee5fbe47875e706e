#include "gsim/tableau.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <chrono>
#include <stdexcept>

namespace gsim {

// ---------------------------------------------------------------------------
// Pauli

Pauli Pauli::single(size_t n, size_t q, char which) {
  Pauli p(n);
  switch (which) {
    case 'X': p.x.set(q, true); break;
    case 'Z': p.z.set(q, true); break;
    case 'Y': p.alpha = true; p.x.set(q, true); p.z.set(q, true); break;
    default: throw std::invalid_argument("Pauli::single: expected X, Y or Z");
  }
  return p;
}

bool Pauli::commutes_with(const Pauli& o) const {
  // Symplectic product <(a|b), (a'|b')> = a.b' + b.a'.
  return !(x.dot(o.z) ^ z.dot(o.x));
}

std::string Pauli::to_string() const {
  std::string s;
  // Normalize i^alpha (-1)^beta into one of +, -, +i, -i.
  s += beta ? "-" : "+";
  if (alpha) s += "i";
  for (size_t q = 0; q < num_qubits(); ++q) {
    bool xs = x.get(q), zs = z.get(q);
    s += xs ? (zs ? 'Y' : 'X') : (zs ? 'Z' : 'I');
    // Y is rendered without pulling out its own i; callers wanting a
    // Hermitian rendering should have alpha == x.z already.
  }
  return s;
}

Pauli pauli_mul(const Pauli& p1, const Pauli& p2) {
  if (p1.num_qubits() != p2.num_qubits())
    throw std::invalid_argument("pauli_mul: size mismatch");
  Pauli r(p1.num_qubits());
  r.alpha = p1.alpha ^ p2.alpha;
  r.beta = p1.beta ^ p2.beta ^ (p1.alpha && p2.alpha) ^ p1.z.dot(p2.x);
  r.x = p1.x ^ p2.x;
  r.z = p1.z ^ p2.z;
  return r;
}

Pauli PauliBlock::pauli(size_t i) const {
  size_t n = rows.cols() / 2;
  BitVector r = rows.row(i);
  return Pauli(alpha.get(i), beta.get(i), r.slice(0, n), r.slice(n, n));
}

void PauliBlock::set_pauli(size_t i, const Pauli& p) {
  rows.set_row(i, p.x.concat(p.z));
  alpha.set(i, p.alpha);
  beta.set(i, p.beta);
}

// ---------------------------------------------------------------------------
// Phase bookkeeping helpers

namespace {

void lower_strict_in_place(BitMatrix& w) {
  for (size_t i = 0; i < w.rows(); ++i)
    for (size_t j = i; j < w.cols(); ++j)
      if (w.get(i, j)) w.set(i, j, false);
}

BitVector row_and_parity(const BitMatrix& a, const BitMatrix& b) {
  // out_i = parity(row_i(a) & row_i(b))
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("row_and_parity: shape mismatch");
  BitVector out(a.rows());
  for (size_t i = 0; i < a.rows(); ++i) {
    uint64_t acc = 0;
    const uint64_t* ra = a.row_words(i);
    const uint64_t* rb = b.row_words(i);
    for (size_t k = 0; k < a.words_per_row(); ++k) acc ^= ra[k] & rb[k];
    if (std::popcount(acc) & 1) out.set(i, true);
  }
  return out;
}

// Appends v as an extra column.
BitMatrix with_extra_col(const BitMatrix& m, const BitVector& v) {
  BitMatrix out(m.rows(), m.cols() + 1);
  for (size_t i = 0; i < m.rows(); ++i) {
    std::copy(m.row_words(i), m.row_words(i) + m.words_per_row(), out.row_words(i));
    if (v.get(i)) out.set(i, m.cols(), true);
  }
  return out;
}

}  // namespace

BitVector diag_lower_outer(const BitMatrix& a, const BitMatrix& x, const BitMatrix& z) {
  const size_t m = a.cols();
  if (x.rows() != m || z.rows() != m || x.cols() != z.cols())
    throw std::invalid_argument("diag_lower_outer: shape mismatch");
  if (m <= 128) {
    BitMatrix w = mat_mul(x, z.transposed());
    lower_strict_in_place(w);
    return row_and_parity(mat_mul(a, w), a);
  }
  size_t m1 = m / 2, m2 = m - m1;
  BitMatrix a1(a.rows(), m1), a2(a.rows(), m2);
  for (size_t i = 0; i < a.rows(); ++i) {
    for (size_t j = 0; j < m1; ++j) if (a.get(i, j)) a1.set(i, j, true);
    for (size_t j = 0; j < m2; ++j) if (a.get(i, m1 + j)) a2.set(i, j, true);
  }
  BitMatrix x1 = x.submatrix(0, 0, m1, x.cols()), x2 = x.submatrix(m1, 0, m2, x.cols());
  BitMatrix z1 = z.submatrix(0, 0, m1, z.cols()), z2 = z.submatrix(m1, 0, m2, z.cols());
  BitVector out = diag_lower_outer(a1, x1, z1);
  out ^= diag_lower_outer(a2, x2, z2);
  // Cross block: the part of lower(X Z^T) with row in the second half and
  // column in the first half is the full product X2 Z1^T.
  out ^= row_and_parity(mat_mul(a2, x2), mat_mul(a1, z1));
  return out;
}

PauliBlock multiply_block(const BitMatrix& t, const PauliBlock& in) {
  const size_t m = in.size();
  if (t.cols() != m) throw std::invalid_argument("multiply_block: shape mismatch");
  const size_t n = in.rows.cols() / 2;
  PauliBlock out;
  out.rows = mat_mul(t, in.rows);
  out.alpha = t.mul(in.alpha);
  out.beta = t.mul(in.beta);
  BitMatrix rx = in.rows.submatrix(0, 0, m, n);
  BitMatrix rz = in.rows.submatrix(0, n, m, n);
  BitMatrix xa = with_extra_col(rx, in.alpha);
  BitMatrix za = with_extra_col(rz, in.alpha);
  if (t.rows() * 4 >= m) {
    // Dense regime: materialize the m x m cross-phase matrix once.
    BitMatrix w = mat_mul(xa, za.transposed());
    lower_strict_in_place(w);
    out.beta ^= row_and_parity(mat_mul(t, w), t);
  } else {
    // Narrow regime: recursive halving, never forms the m x m matrix.
    out.beta ^= diag_lower_outer(t, xa, za);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gates

size_t gate_arity(Gate g) {
  return (g == Gate::CZ || g == Gate::CNOT) ? 2 : 1;
}

const char* gate_name(Gate g) {
  switch (g) {
    case Gate::H: return "H";
    case Gate::S: return "S";
    case Gate::X: return "X";
    case Gate::Z: return "Z";
    case Gate::CZ: return "CZ";
    case Gate::CNOT: return "CNOT";
    case Gate::YBasisChange: return "YBasisChange";
  }
  return "?";
}

std::optional<Gate> gate_from_name(const std::string& name) {
  for (Gate g : {Gate::H, Gate::S, Gate::X, Gate::Z, Gate::CZ, Gate::CNOT,
                 Gate::YBasisChange})
    if (name == gate_name(g)) return g;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tableau

Tableau::Tableau(size_t n)
    : n_(n), m_(BitMatrix::identity(2 * n)), p_(2 * n), s_(2 * n) {}

Tableau Tableau::plus_state(size_t n) {
  Tableau t(n);
  // H on every qubit: X_i <-> Z_i.
  t.m_ = BitMatrix(2 * n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    t.m_.set(i, n + i, true);
    t.m_.set(n + i, i, true);
  }
  return t;
}

Pauli Tableau::row_pauli(size_t row) const {
  BitVector r = m_.row(row);
  return Pauli(p_.get(row), s_.get(row), r.slice(0, n_), r.slice(n_, n_));
}

Pauli conjugate_pauli(const Tableau& t, const Pauli& in) {
  PauliBlock b(1, t.n_);
  b.set_pauli(0, in);
  return conjugate_many(t, b).pauli(0);
}

PauliBlock conjugate_many(const Tableau& t, const PauliBlock& in) {
  if (in.rows.cols() != 2 * t.n_)
    throw std::invalid_argument("conjugate_many: size mismatch");
  PauliBlock base{/*rows=*/t.m_, /*alpha=*/t.p_, /*beta=*/t.s_};
  PauliBlock out = multiply_block(in.rows, base);
  // Fold in the input phases: i^a1 i^a2 = i^(a1+a2) (-1)^(a1 a2).
  out.beta ^= in.beta ^ in.alpha.and_with(out.alpha);
  out.alpha ^= in.alpha;
  return out;
}

bool Tableau::check_invariants() const {
  const size_t n = n_;
  // Symmetry condition M^T Omega M = Omega, checked as M Omega M^T = Omega
  // (equivalent for symplectic M) to keep the row-major products cheap.
  BitMatrix mt = m_.transposed();
  BitMatrix omega(2 * n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    omega.set(i, n + i, true);
    omega.set(n + i, i, true);
  }
  if (mat_mul(mat_mul(mt, omega), m_) != omega) return false;
  // p = diag(M Lambda M^T) = diag(Mx Mz^T).
  BitMatrix mx = m_.submatrix(0, 0, 2 * n, n);
  BitMatrix mz = m_.submatrix(0, n, 2 * n, n);
  if (row_and_parity(mx, mz) != p_) return false;
  // Phases of Hermitian rows stay representable; nothing further to check
  // for s, it is free.
  return true;
}

Tableau compose_on_qubits(const Tableau& t1, const Tableau& t2,
                          const std::vector<size_t>& qubits) {
  const size_t n = t1.num_qubits();
  const size_t m = t2.num_qubits();
  if (qubits.size() != m) throw std::invalid_argument("compose: qubit list size");
  for (size_t i = 0; i < m; ++i) {
    if (qubits[i] >= n) throw std::invalid_argument("compose: qubit out of range");
    if (i && qubits[i] <= qubits[i - 1])
      throw std::invalid_argument("compose: qubit list must be increasing");
  }
  // Strictly lower part of p2 p2^T + M2 Lambda M2^T for the embedded
  // tableau is supported on the embedded coordinates, in the same relative
  // order as the small tableau's own coordinates.
  const BitMatrix& m2 = t2.m();
  BitMatrix m2x = m2.submatrix(0, 0, 2 * m, m);
  BitMatrix m2z = m2.submatrix(0, m, 2 * m, m);
  BitMatrix w = mat_mul(m2x, m2z.transposed());
  for (size_t i = 0; i < 2 * m; ++i)
    for (size_t j = 0; j < 2 * m; ++j)
      if (t2.p().get(i) && t2.p().get(j)) w.flip(i, j);
  lower_strict_in_place(w);

  // Embedded coordinate index c -> full column.
  std::vector<size_t> coord(2 * m);
  for (size_t i = 0; i < m; ++i) {
    coord[i] = qubits[i];
    coord[m + i] = n + qubits[i];
  }

  Tableau out = t1;
  for (size_t row = 0; row < 2 * n; ++row) {
    BitVector c(2 * m);
    for (size_t j = 0; j < 2 * m; ++j)
      if (t1.m().get(row, coord[j])) c.set(j, true);
    if (c.is_zero()) continue;
    BitVector cm = m2.mul_left(c);
    for (size_t j = 0; j < 2 * m; ++j) out.m_.set(row, coord[j], cm.get(j));
    bool cp = c.dot(t2.p());
    bool beta = c.dot(t2.s());
    // c * lower(W) * c^T
    for (size_t i2 = 0; i2 < 2 * m; ++i2)
      if (c.get(i2))
        for (size_t j2 = 0; j2 < i2; ++j2)
          if (c.get(j2) && w.get(i2, j2)) beta = !beta;
    if (cp) {
      if (out.p_.get(row)) beta = !beta;  // i^a i^b carry
      out.p_.flip(row);
    }
    if (beta) out.s_.flip(row);
  }
  return out;
}

Tableau compose(const Tableau& t1, const Tableau& t2, size_t start_qubit) {
  if (t2.n_ < t1.n_) {
    std::vector<size_t> qubits(t2.n_);
    for (size_t i = 0; i < t2.n_; ++i) qubits[i] = start_qubit + i;
    return compose_on_qubits(t1, t2, qubits);
  }
  if (t1.n_ != t2.n_) throw std::invalid_argument("compose: size mismatch");
  PauliBlock b{t1.m_, t1.p_, t1.s_};
  PauliBlock res = conjugate_many(t2, b);
  Tableau out;
  out.n_ = t1.n_;
  out.m_ = std::move(res.rows);
  out.p_ = std::move(res.alpha);
  out.s_ = std::move(res.beta);
  return out;
}

Tableau tensor(const Tableau& t1, const Tableau& t2) {
  const size_t n1 = t1.n_, n2 = t2.n_, n = n1 + n2;
  Tableau out;
  out.n_ = n;
  out.m_ = BitMatrix(2 * n, 2 * n);
  out.p_ = BitVector(2 * n);
  out.s_ = BitVector(2 * n);
  auto place = [&](const Tableau& t, size_t qoff, size_t nsub) {
    for (size_t i = 0; i < 2 * nsub; ++i) {
      size_t row = (i < nsub ? qoff + i : n + qoff + (i - nsub));
      for (size_t j = 0; j < 2 * nsub; ++j) {
        size_t col = (j < nsub ? qoff + j : n + qoff + (j - nsub));
        if (t.m_.get(i, j)) out.m_.set(row, col, true);
      }
      if (t.p_.get(i)) out.p_.set(row, true);
      if (t.s_.get(i)) out.s_.set(row, true);
    }
  };
  place(t1, 0, n1);
  place(t2, n1, n2);
  return out;
}

Tableau Tableau::for_gate(Gate g) {
  auto build = [](size_t n, std::initializer_list<int> bits,
                  std::initializer_list<int> p, std::initializer_list<int> s) {
    Tableau t(n);
    size_t k = 0;
    for (int v : bits) {
      t.m_.set(k / (2 * n), k % (2 * n), v != 0);
      ++k;
    }
    k = 0;
    for (int v : p) t.p_.set(k++, v != 0);
    k = 0;
    for (int v : s) t.s_.set(k++, v != 0);
    return t;
  };
  switch (g) {
    case Gate::H:
      return build(1, {0, 1, /**/ 1, 0}, {0, 0}, {0, 0});
    case Gate::S:
      // S X S^dag = Y = i XZ, S Z S^dag = Z.
      return build(1, {1, 1, /**/ 0, 1}, {1, 0}, {0, 0});
    case Gate::X:
      return build(1, {1, 0, /**/ 0, 1}, {0, 0}, {0, 1});
    case Gate::Z:
      return build(1, {1, 0, /**/ 0, 1}, {0, 0}, {1, 0});
    case Gate::CZ:
      // X1 -> X1 Z2, X2 -> X2 Z1, Z unchanged. Coordinates (x1 x2 z1 z2).
      return build(2,
                   {1, 0, 0, 1,
                    0, 1, 1, 0,
                    0, 0, 1, 0,
                    0, 0, 0, 1},
                   {0, 0, 0, 0}, {0, 0, 0, 0});
    case Gate::CNOT:
      // Control = qubit 0. X1 -> X1 X2, Z2 -> Z1 Z2.
      return build(2,
                   {1, 1, 0, 0,
                    0, 1, 0, 0,
                    0, 0, 1, 0,
                    0, 0, 1, 1},
                   {0, 0, 0, 0}, {0, 0, 0, 0});
    case Gate::YBasisChange: {
      // V = H S^dag maps Y -> Z (and Z -> Y up to phase), so a Z-basis
      // measurement after V is a Y-basis measurement.
      Tableau sdg = build(1, {1, 1, /**/ 0, 1}, {1, 0}, {1, 0});
      return compose(sdg, Tableau::for_gate(Gate::H), 0);
    }
  }
  throw std::invalid_argument("for_gate: unknown gate");
}

void apply_gate(Tableau& t, Gate g, const std::vector<size_t>& qubits) {
  if (qubits.size() != gate_arity(g))
    throw std::invalid_argument("apply_gate: wrong number of targets");
  for (size_t q : qubits)
    if (q >= t.num_qubits()) throw std::invalid_argument("apply_gate: qubit out of range");
  Tableau small = Tableau::for_gate(g);
  std::vector<size_t> sorted = qubits;
  if (sorted.size() == 2) {
    if (sorted[0] == sorted[1]) throw std::invalid_argument("apply_gate: repeated qubit");
    if (sorted[0] > sorted[1]) {
      std::swap(sorted[0], sorted[1]);
      if (g == Gate::CNOT) {
        // Swap the roles inside the 2-qubit tableau: conjugate by SWAP.
        Tableau swapped(2);
        for (size_t i = 0; i < 4; ++i) {
          size_t si = (i < 2 ? 1 - i : 2 + (3 - i));
          for (size_t j = 0; j < 4; ++j) {
            size_t sj = (j < 2 ? 1 - j : 2 + (3 - j));
            swapped.m_.set(si, sj, small.m_.get(i, j));
          }
          swapped.p_.set(si, small.p_.get(i));
          swapped.s_.set(si, small.s_.get(i));
        }
        small = swapped;
      }
    }
  }
  t = compose_on_qubits(t, small, sorted);
}

void apply_cz_batch(Tableau& t, const BitMatrix& adjacency) {
  const size_t n = t.n_;
  if (adjacency.rows() != n || adjacency.cols() != n)
    throw std::invalid_argument("apply_cz_batch: adjacency size mismatch");
  if (!adjacency.is_symmetric())
    throw std::invalid_argument("apply_cz_batch: adjacency must be symmetric");
  for (size_t i = 0; i < n; ++i)
    if (adjacency.get(i, i))
      throw std::invalid_argument("apply_cz_batch: nonzero diagonal");
  // The batch tableau is M2 = [[I, A], [0, I]], p2 = s2 = 0, whose
  // strictly-lower cross matrix is lower(A) in the top-left block. One
  // composition step: Mz += Mx A, s += diag(Mx lower(A) Mx^T).
  BitMatrix mx = t.m_.submatrix(0, 0, 2 * n, n);
  BitMatrix la = adjacency;
  lower_strict_in_place(la);
  t.s_ ^= row_and_parity(mat_mul(mx, la), mx);
  BitMatrix delta = mat_mul(mx, adjacency);
  for (size_t i = 0; i < 2 * n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (delta.get(i, j)) t.m_.flip(i, n + j);
}

// ---------------------------------------------------------------------------
// Measurement

namespace {

// Rewrites the tableau so qubit column j becomes old column perm[j].
void permute_qubits(Tableau& t, const std::vector<size_t>& perm, BitMatrix& m,
                    size_t n) {
  (void)t;
  BitMatrix out(2 * n, 2 * n);
  for (size_t j = 0; j < n; ++j) {
    out.set_col(j, m.col(perm[j]));
    out.set_col(n + j, m.col(n + perm[j]));
  }
  m = std::move(out);
}

struct Measurer {
  Tableau& t;
  size_t n;

  BitMatrix& m() { return const_cast<BitMatrix&>(t.m()); }
  BitVector& p() { return const_cast<BitVector&>(t.p()); }
  BitVector& s() { return const_cast<BitVector&>(t.s()); }

  PauliBlock extract(size_t row0, size_t count) {
    PauliBlock b;
    b.rows = m().submatrix(row0, 0, count, 2 * n);
    b.alpha = BitVector(count);
    b.beta = BitVector(count);
    for (size_t i = 0; i < count; ++i) {
      b.alpha.set(i, p().get(row0 + i));
      b.beta.set(i, s().get(row0 + i));
    }
    return b;
  }

  void install(size_t row0, const PauliBlock& b) {
    for (size_t i = 0; i < b.size(); ++i) {
      m().set_row(row0 + i, b.rows.row(i));
      p().set(row0 + i, b.alpha.get(i));
      s().set(row0 + i, b.beta.get(i));
    }
  }

  // Row-echelon transform built from the LSP factorization of c: returns an
  // invertible T with T*c in reduced row echelon form (pivot columns reduced
  // to unit vectors, pivot rows moved to the top in discovery order).
  static std::pair<BitMatrix, std::vector<size_t>> rref_transform(const BitMatrix& c) {
    LspFactors f = lsp_factorize(c);
    const size_t rows = c.rows();
    BitMatrix linv = inverse(f.l);
    // Row permutation: pivot rows first, the rest after, order preserved.
    std::vector<size_t> order = f.pivot_rows;
    {
      std::vector<char> used(rows, 0);
      for (size_t r : f.pivot_rows) used[r] = 1;
      for (size_t r = 0; r < rows; ++r) if (!used[r]) order.push_back(r);
    }
    BitMatrix pr(rows, rows);
    for (size_t j = 0; j < rows; ++j) pr.set(j, order[j], true);
    BitMatrix e = mat_mul(pr, linv);
    if (f.rank > 0) {
      BitMatrix ec = mat_mul(e, c);
      std::vector<size_t> top(f.rank);
      for (size_t i = 0; i < f.rank; ++i) top[i] = i;
      BitMatrix u = ec.select_rows(top).select_cols(f.pivot_cols);
      BitMatrix uinv = inverse(u);
      BitMatrix blk = BitMatrix::identity(rows);
      for (size_t i = 0; i < f.rank; ++i) {
        for (size_t j = 0; j < f.rank; ++j) blk.set(i, j, uinv.get(i, j));
      }
      e = mat_mul(blk, e);
    }
    return {e, f.pivot_cols};
  }

  // Applies T to the stabilizer block and T^-T to the destabilizer block
  // (or the other way around when `on_stabilizers` is false), preserving
  // the symplectic pairing.
  void transform_halves(const BitMatrix& tr, bool on_stabilizers) {
    BitMatrix other = inverse(tr).transposed();
    const BitMatrix& for_stab = on_stabilizers ? tr : other;
    const BitMatrix& for_destab = on_stabilizers ? other : tr;
    install(0, multiply_block(for_destab, extract(0, n)));
    install(n, multiply_block(for_stab, extract(n, n)));
  }

  // destab_i <- destab_i * prod_j stab_j^{d[i][j]} for j < d.cols().
  void mix_stabs_into_destabs(const BitMatrix& d) {
    size_t r = d.cols();
    PauliBlock stacked = extract(0, n);
    PauliBlock stabs = extract(n, r);
    // Stack [destabs; first r stabs] and multiply by [I | d].
    PauliBlock all;
    all.rows = stacked.rows.vstack(stabs.rows);
    all.alpha = stacked.alpha.concat(stabs.alpha);
    all.beta = stacked.beta.concat(stabs.beta);
    BitMatrix tmix(n, n + r);
    for (size_t i = 0; i < n; ++i) {
      tmix.set(i, i, true);
      for (size_t j = 0; j < r; ++j) if (d.get(i, j)) tmix.set(i, n + j, true);
    }
    install(0, multiply_block(tmix, all));
  }

  // Removes the first `cnt` generator pairs and qubit columns.
  void excise(size_t cnt, std::vector<size_t>& owner) {
    size_t nn = n - cnt;
    BitMatrix nm(2 * nn, 2 * nn);
    BitVector np(2 * nn), ns(2 * nn);
    auto src_row = [&](size_t i) { return i < nn ? cnt + i : n + cnt + (i - nn); };
    auto src_col = [&](size_t j) { return j < nn ? cnt + j : n + cnt + (j - nn); };
    for (size_t i = 0; i < 2 * nn; ++i) {
      size_t si = src_row(i);
      for (size_t j = 0; j < 2 * nn; ++j)
        if (m().get(si, src_col(j))) nm.set(i, j, true);
      np.set(i, p().get(si));
      ns.set(i, s().get(si));
    }
    t = Tableau(nn);
    m() = std::move(nm);
    p() = std::move(np);
    s() = std::move(ns);
    n = nn;
    owner.erase(owner.begin(), owner.begin() + cnt);
  }

  // Moves the given measured columns (values < current measured count) to
  // the front, preserving the relative order of everything else.
  void reorder_measured(const std::vector<size_t>& first, size_t measured,
                        std::vector<size_t>& owner) {
    std::vector<size_t> perm = first;
    std::vector<char> used(n, 0);
    for (size_t c : first) used[c] = 1;
    for (size_t c = 0; c < measured; ++c) if (!used[c]) perm.push_back(c);
    for (size_t c = measured; c < n; ++c) perm.push_back(c);
    permute_qubits(t, perm, m(), n);
    std::vector<size_t> nowner(owner.size());
    for (size_t j = 0; j < owner.size(); ++j) nowner[j] = owner[perm[j]];
    owner = std::move(nowner);
  }
};

}  // namespace

MeasurementResult measure_z_subset(Tableau& t, const std::vector<size_t>& qubits,
                                   MeasureMode mode, Rng& rng,
                                   const BitVector* desired) {
  const size_t n = t.num_qubits();
  const size_t k = qubits.size();
  MeasurementResult result;
  result.outcomes = BitVector(k);
  if (k == 0) return result;
  {
    std::vector<char> seen(n, 0);
    for (size_t q : qubits) {
      if (q >= n) throw std::invalid_argument("measure_z_subset: qubit out of range");
      if (seen[q]++) throw std::invalid_argument("measure_z_subset: repeated qubit");
    }
  }
  if (mode == MeasureMode::Postselect && (!desired || desired->size() != k))
    throw std::invalid_argument("measure_z_subset: desired outcomes required");

  Tableau backup;
  if (mode == MeasureMode::Postselect) backup = t;

  Measurer mm{t, n};
  // Move the measured qubits to the front, in caller order; owner[c] tracks
  // which caller slot a measured column reports to.
  {
    std::vector<size_t> perm(qubits);
    std::vector<char> used(n, 0);
    for (size_t q : qubits) used[q] = 1;
    for (size_t q = 0; q < n; ++q) if (!used[q]) perm.push_back(q);
    permute_qubits(t, perm, mm.m(), n);
  }
  std::vector<size_t> owner(k);
  for (size_t j = 0; j < k; ++j) owner[j] = j;

  // --- Step 1: random outcomes. ------------------------------------------
  BitMatrix c = mm.m().submatrix(n, 0, n, k);
  size_t r = 0;
  if (!c.is_zero()) {
    auto [tr, pivot_cols] = Measurer::rref_transform(c);
    r = pivot_cols.size();
    mm.transform_halves(tr, /*on_stabilizers=*/true);
    mm.reorder_measured(pivot_cols, k, owner);
    // Clear destabilizer X on the pivot columns using the RREF stabilizers.
    BitMatrix d(n, r);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < r; ++j) d.set(i, j, mm.m().get(i, j));
    mm.mix_stabs_into_destabs(d);
    // Old pivot stabilizers become the destabilizers of the collapsed
    // qubits; the new stabilizers are (-1)^z Z_j.
    for (size_t j = 0; j < r; ++j) {
      mm.m().set_row(j, mm.m().row(n + j));
      mm.p().set(j, mm.p().get(n + j));
      mm.s().set(j, mm.s().get(n + j));
      bool z = (mode == MeasureMode::Sample) ? bool(rng() & 1)
                                             : desired->get(owner[j]);
      result.outcomes.set(owner[j], z);
      BitVector zrow(2 * n);
      zrow.set(n + j, true);
      mm.m().set_row(n + j, zrow);
      mm.p().set(n + j, false);
      mm.s().set(n + j, z);
    }
    // Zero the Z components of the remaining stabilizers on the collapsed
    // columns by multiplying in the (-1)^z Z_j rows.
    for (size_t i = r; i < n; ++i)
      for (size_t j = 0; j < r; ++j)
        if (mm.m().get(n + i, n + j)) {
          mm.m().flip(n + i, n + j);
          if (mm.s().get(n + j)) mm.s().flip(n + i);
        }
    mm.excise(r, owner);
  }

  // --- Step 2: determinate outcomes. --------------------------------------
  size_t kd = k - r;
  if (kd > 0) {
    size_t nn = mm.n;
    BitMatrix cd(nn, kd);
    for (size_t i = 0; i < nn; ++i)
      for (size_t j = 0; j < kd; ++j) cd.set(i, j, mm.m().get(i, j));
    auto [tr, pivot_cols] = Measurer::rref_transform(cd);
    if (pivot_cols.size() != kd)
      throw std::logic_error("measure_z_subset: destabilizer rank deficiency");
    mm.transform_halves(tr, /*on_stabilizers=*/false);
    mm.reorder_measured(pivot_cols, kd, owner);
    for (size_t j = 0; j < kd; ++j) {
      // The paired stabilizer must now be +- Z_j exactly.
      BitVector row = mm.m().row(nn + j);
      BitVector want(2 * nn);
      want.set(nn + j, true);
      if (!(row == want) || mm.p().get(nn + j))
        throw std::logic_error("measure_z_subset: unexpected stabilizer form");
      bool z = mm.s().get(nn + j);
      if (mode == MeasureMode::Postselect && desired->get(owner[j]) != z) {
        t = backup;
        result.zero_probability = true;
        return result;
      }
      result.outcomes.set(owner[j], z);
    }
    for (size_t i = kd; i < nn; ++i)
      for (size_t j = 0; j < kd; ++j)
        if (mm.m().get(nn + i, nn + j)) {
          mm.m().flip(nn + i, nn + j);
          if (mm.s().get(nn + j)) mm.s().flip(nn + i);
        }
    mm.excise(kd, owner);
  }
  return result;
}

MeasurementResult measure_bases(Tableau& t, const std::vector<size_t>& qubits,
                                const std::string& bases, MeasureMode mode, Rng& rng,
                                const BitVector* desired) {
  if (bases.size() != qubits.size())
    throw std::invalid_argument("measure_bases: bases/qubits size mismatch");
  for (size_t i = 0; i < qubits.size(); ++i) {
    switch (bases[i]) {
      case 'Z': break;
      case 'X': apply_gate(t, Gate::H, {qubits[i]}); break;
      case 'Y': apply_gate(t, Gate::YBasisChange, {qubits[i]}); break;
      default: throw std::invalid_argument("measure_bases: basis must be X, Y or Z");
    }
  }
  return measure_z_subset(t, qubits, mode, rng, desired);
}

MeasurementResult sample_with_postselection(
    Tableau& t, const std::string& bases,
    const std::vector<std::pair<size_t, bool>>& postselect, Rng& rng) {
  const size_t n = t.num_qubits();
  if (bases.size() != n)
    throw std::invalid_argument("sample_with_postselection: bases size mismatch");
  MeasurementResult result;
  result.outcomes = BitVector(n);
  // Rotate all bases up front, then Z-measure in two batches.
  for (size_t q = 0; q < n; ++q) {
    switch (bases[q]) {
      case 'Z': break;
      case 'X': apply_gate(t, Gate::H, {q}); break;
      case 'Y': apply_gate(t, Gate::YBasisChange, {q}); break;
      default: throw std::invalid_argument("sample_with_postselection: bad basis");
    }
  }
  std::vector<char> constrained(n, 0);
  std::vector<size_t> ps_qubits;
  BitVector ps_bits(postselect.size());
  for (size_t i = 0; i < postselect.size(); ++i) {
    auto [q, b] = postselect[i];
    if (q >= n) throw std::invalid_argument("sample_with_postselection: qubit range");
    if (constrained[q]++)
      throw std::invalid_argument("sample_with_postselection: repeated qubit");
    ps_qubits.push_back(q);
    ps_bits.set(i, b);
  }
  // Postselected qubits first. Surviving-qubit indices shift as columns are
  // excised; track the mapping from original qubit to current column.
  std::vector<size_t> cur(n);
  for (size_t q = 0; q < n; ++q) cur[q] = q;
  auto drop = [&](const std::vector<size_t>& gone) {
    for (size_t q : gone) cur[q] = size_t(-1);
    size_t next = 0;
    for (size_t q = 0; q < n; ++q)
      if (cur[q] != size_t(-1)) cur[q] = next++;
  };
  if (!ps_qubits.empty()) {
    std::vector<size_t> cols;
    for (size_t q : ps_qubits) cols.push_back(cur[q]);
    MeasurementResult ps =
        measure_z_subset(t, cols, MeasureMode::Postselect, rng, &ps_bits);
    if (ps.zero_probability) {
      result.zero_probability = true;
      return result;
    }
    for (size_t i = 0; i < ps_qubits.size(); ++i)
      result.outcomes.set(ps_qubits[i], ps.outcomes.get(i));
    drop(ps_qubits);
  }
  std::vector<size_t> rest;
  for (size_t q = 0; q < n; ++q)
    if (!constrained[q]) rest.push_back(q);
  if (!rest.empty()) {
    std::vector<size_t> cols;
    for (size_t q : rest) cols.push_back(cur[q]);
    MeasurementResult sr = measure_z_subset(t, cols, MeasureMode::Sample, rng);
    for (size_t i = 0; i < rest.size(); ++i)
      result.outcomes.set(rest[i], sr.outcomes.get(i));
  }
  return result;
}

std::optional<bool> measure_z_single(Tableau& t, size_t qubit, MeasureMode mode,
                                     Rng& rng, bool desired) {
  const size_t n = t.num_qubits();
  if (qubit >= n) throw std::invalid_argument("measure_z_single: qubit out of range");
  Measurer mm{t, n};
  size_t rp = 2 * n;
  for (size_t i = n; i < 2 * n; ++i)
    if (mm.m().get(i, qubit)) { rp = i; break; }
  if (rp < 2 * n) {
    // Random outcome: multiply every other row with X support on the qubit
    // by the pivot row, in place on the packed words. The Pauli phase rule
    // needs z_h . x_pivot; the pivot's X half is replicated into Z-half bit
    // positions once so the dot product is an aligned AND + popcount parity.
    BitMatrix& m = mm.m();
    const size_t wpr = m.words_per_row();
    std::vector<uint64_t> pivot_x_in_z(wpr, 0);
    for (size_t i = 0; i < n; ++i)
      if (m.get(rp, i)) pivot_x_in_z[(n + i) >> 6] |= uint64_t(1) << ((n + i) & 63);
    const bool alpha_p = mm.p().get(rp);
    const bool beta_p = mm.s().get(rp);
    const BitVector pivot_row = m.row(rp);
    for (size_t h = 0; h < 2 * n; ++h) {
      if (h == rp || !m.get(h, qubit)) continue;
      const uint64_t* words = m.row_words(h);
      uint64_t acc = 0;
      for (size_t w = 0; w < wpr; ++w) acc ^= words[w] & pivot_x_in_z[w];
      const bool dot = std::popcount(acc) & 1;
      const bool alpha_h = mm.p().get(h);
      mm.s().set(h, mm.s().get(h) ^ beta_p ^ (alpha_h && alpha_p) ^ dot);
      mm.p().set(h, alpha_h ^ alpha_p);
      m.xor_row(h, rp);
    }
    bool z = (mode == MeasureMode::Sample) ? bool(rng() & 1) : desired;
    mm.m().set_row(rp - n, pivot_row);
    mm.p().set(rp - n, alpha_p);
    mm.s().set(rp - n, beta_p);
    BitVector zrow(2 * n);
    zrow.set(n + qubit, true);
    mm.m().set_row(rp, zrow);
    mm.p().set(rp, false);
    mm.s().set(rp, z);
    return z;
  }
  // Determinate outcome: product of the stabilizers flagged by the
  // destabilizer X column.
  Pauli prod(n);
  for (size_t i = 0; i < n; ++i)
    if (mm.m().get(i, qubit)) prod = pauli_mul(prod, t.stabilizer(i));
  BitVector want(n);
  want.set(qubit, true);
  if (prod.alpha || !prod.x.is_zero() || !(prod.z == want))
    throw std::logic_error("measure_z_single: inconsistent determinate product");
  bool z = prod.beta;
  if (mode == MeasureMode::Postselect && z != desired) return std::nullopt;
  return z;
}

void rotate_bases(Tableau& t, const std::string& bases) {
  const size_t n = t.n_;
  if (bases.size() != n)
    throw std::invalid_argument("rotate_bases: bases size mismatch");
  for (char b : bases)
    if (b != 'X' && b != 'Y' && b != 'Z')
      throw std::invalid_argument("rotate_bases: basis must be X, Y or Z");

  // The fast path needs the X and Z halves of each row word-aligned.
  if (n % 64 != 0) {
    for (size_t q = 0; q < n; ++q) {
      if (bases[q] == 'X') apply_gate(t, Gate::H, {q});
      if (bases[q] == 'Y') apply_gate(t, Gate::YBasisChange, {q});
    }
    return;
  }

  // Per-qubit images: H maps (x, z) -> (z, x) with a sign flip when x=z=1
  // (XZ -> ZX = -XZ). The Y-basis change V maps X -> Y = i XZ and Z -> X,
  // so (x, z) -> (x^z, x) with an i-power of x + 2xz. I-powers add across
  // qubits mod 4; the low bit lands in the row's i^p, the carry in its sign.
  const size_t xw = n / 64;
  std::vector<uint64_t> mx(xw, 0), my(xw, 0);
  for (size_t q = 0; q < n; ++q) {
    if (bases[q] == 'X') mx[q >> 6] |= uint64_t(1) << (q & 63);
    if (bases[q] == 'Y') my[q >> 6] |= uint64_t(1) << (q & 63);
  }
  for (size_t h = 0; h < 2 * n; ++h) {
    uint64_t* w = t.m_.row_words(h);
    uint64_t* x = w;
    uint64_t* z = w + xw;
    size_t count_h = 0, count_yx = 0, count_yxz = 0;
    for (size_t k = 0; k < xw; ++k) {
      const uint64_t xk = x[k], zk = z[k];
      count_h += std::popcount(xk & zk & mx[k]);
      count_yx += std::popcount(xk & my[k]);
      count_yxz += std::popcount(xk & zk & my[k]);
      const uint64_t keep = ~(mx[k] | my[k]);
      x[k] = (xk & keep) | (zk & mx[k]) | ((xk ^ zk) & my[k]);
      z[k] = (zk & keep) | (xk & (mx[k] | my[k]));
    }
    const size_t ipow = size_t(t.p_.get(h)) + count_yx + 2 * count_yxz;
    t.p_.set(h, ipow & 1);
    t.s_.set(h, t.s_.get(h) ^ ((ipow >> 1) & 1) ^ (count_h & 1));
  }
}

SequentialMeasurer::SequentialMeasurer(Tableau& t)
    : t_(t), n_(t.num_qubits()), xt_(t.num_qubits(), 2 * t.num_qubits()) {
  const size_t wpr = t_.m_.words_per_row();
  aligned_ = (n_ % 64 == 0);
  xw_ = n_ / 64;
  xspan_.assign(2 * n_, {0, 0});
  zspan_.assign(2 * n_, {0, 0});
  for (size_t h = 0; h < 2 * n_; ++h) {
    const uint64_t* w = t_.m_.row_words(h);
    for (size_t k = 0; k * 64 < n_; ++k) {
      uint64_t word = w[k];
      if ((k + 1) * 64 > n_) word &= (uint64_t(1) << (n_ & 63)) - 1;
      while (word) {
        size_t i = k * 64 + size_t(std::countr_zero(word));
        word &= word - 1;
        xt_.set(i, h, true);
      }
    }
    if (!aligned_) {
      // Unaligned halves share a boundary word; fall back to full-row spans.
      xspan_[h] = {0, uint32_t(wpr)};
      zspan_[h] = {0, uint32_t(wpr)};
      continue;
    }
    auto scan = [&](size_t lo, size_t hi) -> std::pair<uint32_t, uint32_t> {
      size_t a = lo, b = hi;
      while (a < b && w[a] == 0) ++a;
      while (b > a && w[b - 1] == 0) --b;
      return {uint32_t(a), uint32_t(b)};
    };
    auto [xa, xb] = scan(0, xw_);
    auto [za, zb] = scan(xw_, wpr);
    xspan_[h] = {xa, xb};
    zspan_[h] = {za, zb};
  }
}

size_t g_meas_calls = 0, g_meas_cands = 0, g_meas_pivx = 0, g_meas_xspanw = 0,
       g_meas_zspanw = 0, g_meas_xor_words = 0, g_meas_dot_words = 0,
       g_meas_flips = 0;
double g_t_cands = 0, g_t_piv = 0, g_t_loop = 0, g_t_tail = 0, g_t_det = 0;
namespace {
inline double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

namespace {
// Union of two word ranges; {lo, lo} means empty.
inline void widen(std::pair<uint32_t, uint32_t>& dst, uint32_t lo, uint32_t hi) {
  if (lo >= hi) return;
  if (dst.first >= dst.second) {
    dst = {lo, hi};
    return;
  }
  dst.first = std::min(dst.first, lo);
  dst.second = std::max(dst.second, hi);
}
}  // namespace

std::optional<bool> SequentialMeasurer::measure(size_t qubit, MeasureMode mode,
                                                Rng& rng, bool desired) {
  if (qubit >= n_)
    throw std::invalid_argument("SequentialMeasurer: qubit out of range");
  const size_t n = n_;
  BitMatrix& m = t_.m_;
  const size_t wpr = m.words_per_row();

  double tmark = now_s();
  // Rows with X support on the qubit, ascending (matching the scan order of
  // measure_z_single).
  std::vector<size_t> cands;
  {
    const uint64_t* qw = xt_.row_words(qubit);
    for (size_t k = 0; k < xt_.words_per_row(); ++k) {
      uint64_t word = qw[k];
      while (word) {
        size_t h = k * 64 + size_t(std::countr_zero(word));
        word &= word - 1;
        if (h < 2 * n) cands.push_back(h);
      }
    }
  }
  size_t rp = 2 * n;
  for (size_t h : cands)
    if (h >= n) { rp = h; break; }
  g_t_cands += now_s() - tmark;
  tmark = now_s();

  if (rp < 2 * n) {
    // Random outcome; same update as measure_z_single, plus index and
    // row-span upkeep.  All word loops are confined to the pivot row's
    // nonzero word ranges, which stay short for geometrically local states.
    const auto pxs = xspan_[rp];
    const auto pzs = zspan_[rp];
    const uint64_t* pw = m.row_words(rp);
    std::vector<size_t> pivx;
    std::vector<uint64_t> pivot_x_in_z(wpr, 0);
    {
      uint32_t klo = aligned_ ? pxs.first : 0;
      uint32_t khi = aligned_ ? pxs.second : uint32_t((n + 63) / 64);
      for (uint32_t k = klo; k < khi; ++k) {
        uint64_t word = pw[k];
        if (size_t(k + 1) * 64 > n) word &= (uint64_t(1) << (n & 63)) - 1;
        while (word) {
          size_t i = size_t(k) * 64 + size_t(std::countr_zero(word));
          word &= word - 1;
          pivx.push_back(i);
          pivot_x_in_z[(n + i) >> 6] |= uint64_t(1) << ((n + i) & 63);
        }
      }
    }
    // Word range occupied by pivot_x_in_z (the pivot's X support shifted
    // into the Z half).
    const uint32_t plo = aligned_ ? uint32_t(xw_) + pxs.first : 0;
    const uint32_t phi = aligned_ ? uint32_t(xw_) + pxs.second : uint32_t(wpr);
    ++g_meas_calls;
    g_meas_cands += cands.size();
    g_meas_pivx += pivx.size();
    g_meas_xspanw += pxs.second - pxs.first;
    g_meas_zspanw += pzs.second - pzs.first;
    const bool alpha_p = t_.p_.get(rp);
    const bool beta_p = t_.s_.get(rp);
    const BitVector pivot_row = m.row(rp);
    const size_t dst = rp - n;
    std::vector<size_t> old_dst_x;
    {
      uint32_t klo = aligned_ ? xspan_[dst].first : 0;
      uint32_t khi = aligned_ ? xspan_[dst].second : uint32_t((n + 63) / 64);
      const uint64_t* dw = m.row_words(dst);
      for (uint32_t k = klo; k < khi; ++k) {
        uint64_t word = dw[k];
        if (size_t(k + 1) * 64 > n) word &= (uint64_t(1) << (n & 63)) - 1;
        while (word) {
          old_dst_x.push_back(size_t(k) * 64 + size_t(std::countr_zero(word)));
          word &= word - 1;
        }
      }
    }

    g_t_piv += now_s() - tmark;
    tmark = now_s();
    for (size_t h : cands) {
      if (h == rp) continue;
      uint64_t* wh = m.row_words(h);
      uint64_t acc = 0;
      const uint32_t lo = std::max(plo, zspan_[h].first);
      const uint32_t hi = std::min(phi, zspan_[h].second);
      if (hi > lo) g_meas_dot_words += hi - lo;
      g_meas_xor_words += (pxs.second - pxs.first) + (pzs.second - pzs.first);
      g_meas_flips += pivx.size();
      for (uint32_t w = lo; w < hi; ++w) acc ^= wh[w] & pivot_x_in_z[w];
      const bool dot = std::popcount(acc) & 1;
      const bool alpha_h = t_.p_.get(h);
      t_.s_.set(h, t_.s_.get(h) ^ beta_p ^ (alpha_h && alpha_p) ^ dot);
      t_.p_.set(h, alpha_h ^ alpha_p);
      if (aligned_) {
        for (uint32_t w = pxs.first; w < pxs.second; ++w) wh[w] ^= pw[w];
        for (uint32_t w = pzs.first; w < pzs.second; ++w) wh[w] ^= pw[w];
        widen(xspan_[h], pxs.first, pxs.second);
        widen(zspan_[h], pzs.first, pzs.second);
      } else {
        m.xor_row(h, rp);
      }
      for (size_t i : pivx) xt_.flip(i, h);
    }
    g_t_loop += now_s() - tmark;
    tmark = now_s();
    bool z = (mode == MeasureMode::Sample) ? bool(rng() & 1) : desired;
    m.set_row(dst, pivot_row);
    t_.p_.set(dst, alpha_p);
    t_.s_.set(dst, beta_p);
    xspan_[dst] = pxs;
    zspan_[dst] = pzs;
    for (size_t i : old_dst_x) xt_.set(i, dst, false);
    for (size_t i : pivx) xt_.set(i, dst, true);
    BitVector zrow(2 * n);
    zrow.set(n + qubit, true);
    m.set_row(rp, zrow);
    t_.p_.set(rp, false);
    t_.s_.set(rp, z);
    if (aligned_) {
      xspan_[rp] = {0, 0};
      uint32_t zw = uint32_t((n + qubit) >> 6);
      zspan_[rp] = {zw, zw + 1};
    } else {
      xspan_[rp] = {0, uint32_t(wpr)};
      zspan_[rp] = {0, uint32_t(wpr)};
    }
    for (size_t i : pivx) xt_.set(i, rp, false);
    g_t_tail += now_s() - tmark;
    return z;
  }
  g_t_det -= now_s();

  // Determinate outcome: product of the stabilizers flagged by the
  // destabilizer X column.
  Pauli prod(n);
  for (size_t h : cands) prod = pauli_mul(prod, t_.stabilizer(h));
  BitVector want(n);
  want.set(qubit, true);
  if (prod.alpha || !prod.x.is_zero() || !(prod.z == want))
    throw std::logic_error("SequentialMeasurer: inconsistent determinate product");
  bool z = prod.beta;
  g_t_det += now_s();
  if (mode == MeasureMode::Postselect && z != desired) return std::nullopt;
  return z;
}

}  // namespace gsim
