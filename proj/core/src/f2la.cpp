#include "gsim/f2la.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace gsim {

namespace {
// Mask for the unused high bits of the last word of an n-bit row.
uint64_t tail_mask(size_t n) {
  size_t rem = n & 63;
  return rem == 0 ? ~uint64_t(0) : (uint64_t(1) << rem) - 1;
}
}  // namespace

// ---------------------------------------------------------------------------
// BitVector

BitVector BitVector::random(size_t n, Rng& rng) {
  BitVector v(n);
  for (auto& w : v.w_) w = rng();
  if (!v.w_.empty()) v.w_.back() &= tail_mask(n);
  return v;
}

BitVector BitVector::parse(const std::string& s) {
  BitVector v(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') v.set(i, true);
    else if (s[i] != '0') throw std::invalid_argument("BitVector::parse: expected 0/1");
  }
  return v;
}

bool BitVector::is_zero() const {
  return std::all_of(w_.begin(), w_.end(), [](uint64_t x) { return x == 0; });
}

size_t BitVector::popcount() const {
  size_t c = 0;
  for (uint64_t x : w_) c += std::popcount(x);
  return c;
}

size_t BitVector::first_set() const {
  for (size_t i = 0; i < w_.size(); ++i)
    if (w_[i]) return i * 64 + std::countr_zero(w_[i]);
  return n_;
}

BitVector& BitVector::operator^=(const BitVector& o) {
  if (n_ != o.n_) throw std::invalid_argument("BitVector: size mismatch");
  for (size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  return *this;
}

bool BitVector::dot(const BitVector& o) const {
  if (n_ != o.n_) throw std::invalid_argument("BitVector::dot: size mismatch");
  uint64_t acc = 0;
  for (size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & o.w_[i];
  return std::popcount(acc) & 1;
}

BitVector BitVector::and_with(const BitVector& o) const {
  if (n_ != o.n_) throw std::invalid_argument("BitVector::and_with: size mismatch");
  BitVector r(n_);
  for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
  return r;
}

BitVector BitVector::concat(const BitVector& o) const {
  BitVector r(n_ + o.n_);
  for (size_t i = 0; i < n_; ++i) if (get(i)) r.set(i, true);
  for (size_t i = 0; i < o.n_; ++i) if (o.get(i)) r.set(n_ + i, true);
  return r;
}

BitVector BitVector::slice(size_t begin, size_t len) const {
  if (begin + len > n_) throw std::invalid_argument("BitVector::slice: out of range");
  BitVector r(len);
  for (size_t i = 0; i < len; ++i) if (get(begin + i)) r.set(i, true);
  return r;
}

std::string BitVector::to_string() const {
  std::string s(n_, '0');
  for (size_t i = 0; i < n_; ++i) if (get(i)) s[i] = '1';
  return s;
}

// ---------------------------------------------------------------------------
// BitMatrix

BitMatrix BitMatrix::identity(size_t n) {
  BitMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::random(size_t rows, size_t cols, Rng& rng) {
  BitMatrix m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    uint64_t* r = m.row_words(i);
    for (size_t k = 0; k < m.wpr_; ++k) r[k] = rng();
    if (m.wpr_) r[m.wpr_ - 1] &= tail_mask(cols);
  }
  return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVector>& rows) {
  if (rows.empty()) return BitMatrix();
  BitMatrix m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
  return m;
}

BitMatrix BitMatrix::parse(const std::string& text) {
  std::istringstream in(text);
  size_t rows, cols;
  if (!(in >> rows >> cols)) throw std::invalid_argument("BitMatrix::parse: bad header");
  BitMatrix m(rows, cols);
  std::string line;
  for (size_t i = 0; i < rows; ++i) {
    if (!(in >> line) || line.size() != cols)
      throw std::invalid_argument("BitMatrix::parse: bad row " + std::to_string(i));
    for (size_t j = 0; j < cols; ++j) {
      if (line[j] == '1') m.set(i, j, true);
      else if (line[j] != '0') throw std::invalid_argument("BitMatrix::parse: expected 0/1");
    }
  }
  return m;
}

BitVector BitMatrix::row(size_t i) const {
  BitVector v(c_);
  std::copy(row_words(i), row_words(i) + wpr_, v.words().begin());
  return v;
}

void BitMatrix::set_row(size_t i, const BitVector& v) {
  if (v.size() != c_) throw std::invalid_argument("BitMatrix::set_row: size mismatch");
  std::copy(v.words().begin(), v.words().end(), row_words(i));
}

BitVector BitMatrix::col(size_t j) const {
  BitVector v(r_);
  for (size_t i = 0; i < r_; ++i) if (get(i, j)) v.set(i, true);
  return v;
}

void BitMatrix::set_col(size_t j, const BitVector& v) {
  if (v.size() != r_) throw std::invalid_argument("BitMatrix::set_col: size mismatch");
  for (size_t i = 0; i < r_; ++i) set(i, j, v.get(i));
}

void BitMatrix::xor_row(size_t dst, size_t src) {
  uint64_t* d = row_words(dst);
  const uint64_t* s = row_words(src);
  for (size_t k = 0; k < wpr_; ++k) d[k] ^= s[k];
}

void BitMatrix::xor_row(size_t dst, const BitVector& v) {
  if (v.size() != c_) throw std::invalid_argument("BitMatrix::xor_row: size mismatch");
  uint64_t* d = row_words(dst);
  for (size_t k = 0; k < wpr_; ++k) d[k] ^= v.words()[k];
}

void BitMatrix::swap_rows(size_t i, size_t j) {
  if (i == j) return;
  std::swap_ranges(row_words(i), row_words(i) + wpr_, row_words(j));
}

BitMatrix BitMatrix::transposed() const {
  BitMatrix t(c_, r_);
  for (size_t i = 0; i < r_; ++i) {
    const uint64_t* rw = row_words(i);
    for (size_t k = 0; k < wpr_; ++k) {
      uint64_t w = rw[k];
      while (w) {
        size_t j = k * 64 + std::countr_zero(w);
        t.set(j, i, true);
        w &= w - 1;
      }
    }
  }
  return t;
}

BitMatrix BitMatrix::operator^(const BitMatrix& o) const {
  BitMatrix r = *this; r ^= o; return r;
}

BitMatrix& BitMatrix::operator^=(const BitMatrix& o) {
  if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("BitMatrix: shape mismatch");
  for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
  return *this;
}

BitVector BitMatrix::mul(const BitVector& v) const {
  if (v.size() != c_) throw std::invalid_argument("BitMatrix::mul: size mismatch");
  BitVector r(r_);
  for (size_t i = 0; i < r_; ++i) {
    uint64_t acc = 0;
    const uint64_t* rw = row_words(i);
    for (size_t k = 0; k < wpr_; ++k) acc ^= rw[k] & v.words()[k];
    if (std::popcount(acc) & 1) r.set(i, true);
  }
  return r;
}

BitVector BitMatrix::mul_left(const BitVector& v) const {
  if (v.size() != r_) throw std::invalid_argument("BitMatrix::mul_left: size mismatch");
  BitVector r(c_);
  for (size_t i = 0; i < r_; ++i) {
    if (!v.get(i)) continue;
    const uint64_t* rw = row_words(i);
    for (size_t k = 0; k < wpr_; ++k) r.words()[k] ^= rw[k];
  }
  return r;
}

BitMatrix BitMatrix::submatrix(size_t row0, size_t col0, size_t nrows, size_t ncols) const {
  if (row0 + nrows > r_ || col0 + ncols > c_)
    throw std::invalid_argument("BitMatrix::submatrix: out of range");
  BitMatrix m(nrows, ncols);
  for (size_t i = 0; i < nrows; ++i)
    for (size_t j = 0; j < ncols; ++j)
      if (get(row0 + i, col0 + j)) m.set(i, j, true);
  return m;
}

BitMatrix BitMatrix::select_rows(const std::vector<size_t>& idx) const {
  BitMatrix m(idx.size(), c_);
  for (size_t i = 0; i < idx.size(); ++i)
    std::copy(row_words(idx[i]), row_words(idx[i]) + wpr_, m.row_words(i));
  return m;
}

BitMatrix BitMatrix::select_cols(const std::vector<size_t>& idx) const {
  BitMatrix m(r_, idx.size());
  for (size_t i = 0; i < r_; ++i)
    for (size_t j = 0; j < idx.size(); ++j)
      if (get(i, idx[j])) m.set(i, j, true);
  return m;
}

BitMatrix BitMatrix::vstack(const BitMatrix& below) const {
  if (c_ != below.c_) throw std::invalid_argument("BitMatrix::vstack: column mismatch");
  BitMatrix m(r_ + below.r_, c_);
  std::copy(w_.begin(), w_.end(), m.w_.begin());
  std::copy(below.w_.begin(), below.w_.end(), m.w_.begin() + w_.size());
  return m;
}

BitMatrix BitMatrix::hstack(const BitMatrix& right) const {
  if (r_ != right.r_) throw std::invalid_argument("BitMatrix::hstack: row mismatch");
  BitMatrix m(r_, c_ + right.c_);
  for (size_t i = 0; i < r_; ++i) {
    for (size_t j = 0; j < c_; ++j) if (get(i, j)) m.set(i, j, true);
    for (size_t j = 0; j < right.c_; ++j) if (right.get(i, j)) m.set(i, c_ + j, true);
  }
  return m;
}

bool BitMatrix::is_zero() const {
  return std::all_of(w_.begin(), w_.end(), [](uint64_t x) { return x == 0; });
}

bool BitMatrix::is_symmetric() const {
  if (r_ != c_) return false;
  for (size_t i = 0; i < r_; ++i)
    for (size_t j = i + 1; j < c_; ++j)
      if (get(i, j) != get(j, i)) return false;
  return true;
}

std::string BitMatrix::to_text() const {
  std::ostringstream out;
  out << r_ << ' ' << c_ << '\n';
  for (size_t i = 0; i < r_; ++i) out << row(i).to_string() << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Multiplication

namespace {

// C_row_i ^= sum over set bits k of A_row_i of B_row_k. Blocked over columns
// of A so the touched rows of B stay in cache.
BitMatrix mul_cubic(const BitMatrix& a, const BitMatrix& b) {
  BitMatrix c(a.rows(), b.cols());
  const size_t kb = 256;  // rows of B per block
  for (size_t k0 = 0; k0 < a.cols(); k0 += kb) {
    size_t k1 = std::min(a.cols(), k0 + kb);
    for (size_t i = 0; i < a.rows(); ++i) {
      uint64_t* ci = c.row_words(i);
      for (size_t k = k0; k < k1; ++k) {
        if (!a.get(i, k)) continue;
        const uint64_t* bk = b.row_words(k);
        for (size_t w = 0; w < c.words_per_row(); ++w) ci[w] ^= bk[w];
      }
    }
  }
  return c;
}

// Method of four Russians: precompute XOR combinations of groups of t rows
// of B, then combine one table lookup per group instead of t row XORs.
BitMatrix mul_m4r(const BitMatrix& a, const BitMatrix& b) {
  const size_t t = 8;
  BitMatrix c(a.rows(), b.cols());
  const size_t wpr = c.words_per_row();
  std::vector<uint64_t> table((size_t(1) << t) * wpr);
  for (size_t k0 = 0; k0 < a.cols(); k0 += t) {
    size_t span = std::min(t, a.cols() - k0);
    size_t entries = size_t(1) << span;
    std::fill(table.begin(), table.begin() + entries * wpr, 0);
    // Gray-code fill: entry g differs from its predecessor by one row of B.
    for (size_t idx = 1; idx < entries; ++idx) {
      size_t g = idx ^ (idx >> 1);
      size_t gprev = (idx - 1) ^ ((idx - 1) >> 1);
      size_t bit = std::countr_zero(uint64_t(g ^ gprev));
      const uint64_t* src = table.data() + gprev * wpr;
      const uint64_t* brow = b.row_words(k0 + bit);
      uint64_t* dst = table.data() + g * wpr;
      for (size_t w = 0; w < wpr; ++w) dst[w] = src[w] ^ brow[w];
    }
    for (size_t i = 0; i < a.rows(); ++i) {
      size_t key = 0;
      for (size_t j = 0; j < span; ++j) key |= size_t(a.get(i, k0 + j)) << j;
      if (!key) continue;
      const uint64_t* src = table.data() + key * wpr;
      uint64_t* ci = c.row_words(i);
      for (size_t w = 0; w < wpr; ++w) ci[w] ^= src[w];
    }
  }
  return c;
}

}  // namespace

BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b, MulKernel kernel) {
  if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: inner dimension mismatch");
  return kernel == MulKernel::FourRussians ? mul_m4r(a, b) : mul_cubic(a, b);
}

// ---------------------------------------------------------------------------
// LSP factorization

LspFactors lsp_factorize(const BitMatrix& m) {
  const size_t rows = m.rows(), cols = m.cols();
  LspFactors f;
  f.l = BitMatrix::identity(rows);
  BitMatrix cur = m;  // becomes S before column permutation
  for (size_t i = 0; i < rows; ++i) {
    // Eliminate against previously discovered pivots, recording coefficients.
    for (size_t j = 0; j < f.rank; ++j) {
      if (cur.get(i, f.pivot_cols[j])) {
        cur.xor_row(i, f.pivot_rows[j]);
        f.l.set(i, f.pivot_rows[j], true);
      }
    }
    BitVector r = cur.row(i);
    size_t lead = r.first_set();
    if (lead < cols) {
      f.pivot_rows.push_back(i);
      f.pivot_cols.push_back(lead);
      ++f.rank;
    }
  }
  // perm[j] = original column holding the j-th column of S: pivots first in
  // discovery order, then the remaining columns in increasing order.
  f.perm = f.pivot_cols;
  std::vector<char> used(cols, 0);
  for (size_t c : f.pivot_cols) used[c] = 1;
  for (size_t c = 0; c < cols; ++c) if (!used[c]) f.perm.push_back(c);
  f.s = BitMatrix(rows, cols);
  for (size_t j = 0; j < cols; ++j) f.s.set_col(j, cur.col(f.perm[j]));
  return f;
}

BitMatrix permutation_matrix(const std::vector<size_t>& perm) {
  BitMatrix p(perm.size(), perm.size());
  // S has column j where M has column perm[j]; S * P = (L^-1) M requires
  // P[j][perm[j]] = 1.
  for (size_t j = 0; j < perm.size(); ++j) p.set(j, perm[j], true);
  return p;
}

// ---------------------------------------------------------------------------
// Inverses and solving

BitMatrix inverse(const BitMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: not square");
  size_t n = m.rows();
  BitMatrix a = m, inv = BitMatrix::identity(n);
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && !a.get(piv, col)) ++piv;
    if (piv == n) throw std::invalid_argument("inverse: singular matrix");
    a.swap_rows(col, piv);
    inv.swap_rows(col, piv);
    for (size_t i = 0; i < n; ++i) {
      if (i != col && a.get(i, col)) {
        a.xor_row(i, col);
        inv.xor_row(i, col);
      }
    }
  }
  return inv;
}

size_t rank(const BitMatrix& m) { return lsp_factorize(m).rank; }

namespace {

// Generalized inverse for rank-r C via an invertible r x r pivot submatrix A:
// embed A^-1 at the transposed pivot positions and zero elsewhere.
BitMatrix gen_inv_core(const BitMatrix& c) {
  LspFactors f = lsp_factorize(c);
  BitMatrix g(c.cols(), c.rows());
  if (f.rank == 0) return g;
  BitMatrix a = c.select_rows(f.pivot_rows).select_cols(f.pivot_cols);
  BitMatrix ainv = inverse(a);
  for (size_t i = 0; i < f.rank; ++i)
    for (size_t j = 0; j < f.rank; ++j)
      if (ainv.get(i, j)) g.set(f.pivot_cols[i], f.pivot_rows[j], true);
  return g;
}

}  // namespace

BitMatrix generalized_inverse(const BitMatrix& c) {
  if (c.rows() > c.cols()) return gen_inv_core(c.transposed()).transposed();
  return gen_inv_core(c);
}

std::vector<size_t> column_basis(const BitMatrix& m) {
  // Row-reduce the transpose: column j of m is kept iff it is independent of
  // the kept columns to its left.
  BitMatrix t = m.transposed();
  std::vector<size_t> kept;
  std::vector<BitVector> pivots;   // reduced representatives
  std::vector<size_t> leads;
  for (size_t j = 0; j < t.rows(); ++j) {
    BitVector v = t.row(j);
    for (size_t p = 0; p < pivots.size(); ++p)
      if (v.get(leads[p])) v ^= pivots[p];
    size_t lead = v.first_set();
    if (lead < v.size()) {
      kept.push_back(j);
      pivots.push_back(v);
      leads.push_back(lead);
    }
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Affine subspaces

bool AffineSubspace::contains(const BitVector& v) const {
  if (v.size() != ambient_dim()) return false;
  // v - offset must lie in the column space of basis.
  BitVector target = v ^ offset;
  auto sol = solve_linear(basis, target);
  return sol.has_value();
}

std::vector<BitVector> AffineSubspace::enumerate() const {
  if (dim() > 24) throw std::invalid_argument("AffineSubspace::enumerate: too large");
  std::vector<BitVector> out;
  out.reserve(size_t(1) << dim());
  for (size_t mask = 0; mask < (size_t(1) << dim()); ++mask) {
    BitVector v = offset;
    for (size_t j = 0; j < dim(); ++j)
      if ((mask >> j) & 1) v ^= basis.col(j);
    out.push_back(v);
  }
  return out;
}

std::optional<AffineSubspace> solve_linear(const BitMatrix& c, const BitVector& d) {
  if (c.rows() != d.size()) throw std::invalid_argument("solve_linear: size mismatch");
  BitMatrix g = generalized_inverse(c);
  BitVector f = g.mul(d);
  if (!(c.mul(f) == d)) return std::nullopt;
  // Null space of C is the column space of I + C^g C.
  BitMatrix e = mat_mul(g, c) ^ BitMatrix::identity(c.cols());
  std::vector<size_t> idx = column_basis(e);
  AffineSubspace s;
  s.basis = e.select_cols(idx);
  s.offset = f;
  return s;
}

BitVector sample_uniform(const AffineSubspace& s, Rng& rng) {
  BitVector v = s.offset;
  for (size_t j = 0; j < s.dim(); ++j)
    if (rng() & 1) v ^= s.basis.col(j);
  return v;
}

}  // namespace gsim
