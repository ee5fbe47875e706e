// Bit-packed linear algebra over GF(2).
//
// Vectors and matrices are stored in 64-bit words, row-major. Matrix
// multiplication uses a blocked cubic kernel by default; a "method of four
// Russians" kernel can be selected via MulKernel for large operands. No
// Strassen-style recursion is used: for the operand sizes this library
// targets (a few thousand rows) the word-parallel cubic kernel is already
// memory-bound and the galactic-constant alternatives do not pay off.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsim {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// BitVector

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  static BitVector random(size_t n, Rng& rng);
  // Parses a string of '0'/'1' characters.
  static BitVector parse(const std::string& s);

  size_t size() const { return n_; }
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(size_t i, bool v) {
    uint64_t m = uint64_t(1) << (i & 63);
    if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
  }
  void flip(size_t i) { w_[i >> 6] ^= uint64_t(1) << (i & 63); }

  void clear() { std::fill(w_.begin(), w_.end(), 0); }
  bool is_zero() const;
  size_t popcount() const;
  // Index of the first set bit, or size() if none.
  size_t first_set() const;

  BitVector& operator^=(const BitVector& o);
  BitVector operator^(const BitVector& o) const {
    BitVector r = *this; r ^= o; return r;
  }
  bool operator==(const BitVector& o) const { return n_ == o.n_ && w_ == o.w_; }

  // Inner product mod 2.
  bool dot(const BitVector& o) const;
  // Pointwise AND.
  BitVector and_with(const BitVector& o) const;

  // Concatenation: this followed by o.
  BitVector concat(const BitVector& o) const;
  BitVector slice(size_t begin, size_t len) const;

  std::string to_string() const;

  const std::vector<uint64_t>& words() const { return w_; }
  std::vector<uint64_t>& words() { return w_; }

 private:
  size_t n_ = 0;
  std::vector<uint64_t> w_;
};

// ---------------------------------------------------------------------------
// BitMatrix

enum class MulKernel { Cubic, FourRussians };

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t rows, size_t cols)
      : r_(rows), c_(cols), wpr_((cols + 63) / 64), w_(r_ * wpr_, 0) {}

  static BitMatrix identity(size_t n);
  static BitMatrix zero(size_t rows, size_t cols) { return BitMatrix(rows, cols); }
  static BitMatrix random(size_t rows, size_t cols, Rng& rng);
  // Builds a matrix whose rows are the given vectors (all the same length).
  static BitMatrix from_rows(const std::vector<BitVector>& rows);
  // Text format: first line "rows cols", then one line of 0/1 per row.
  static BitMatrix parse(const std::string& text);

  size_t rows() const { return r_; }
  size_t cols() const { return c_; }
  bool get(size_t i, size_t j) const {
    return (w_[i * wpr_ + (j >> 6)] >> (j & 63)) & 1;
  }
  void set(size_t i, size_t j, bool v) {
    uint64_t m = uint64_t(1) << (j & 63);
    uint64_t& word = w_[i * wpr_ + (j >> 6)];
    if (v) word |= m; else word &= ~m;
  }
  void flip(size_t i, size_t j) {
    w_[i * wpr_ + (j >> 6)] ^= uint64_t(1) << (j & 63);
  }

  bool operator==(const BitMatrix& o) const {
    return r_ == o.r_ && c_ == o.c_ && w_ == o.w_;
  }

  BitVector row(size_t i) const;
  void set_row(size_t i, const BitVector& v);
  BitVector col(size_t j) const;
  void set_col(size_t j, const BitVector& v);
  // rows[i] ^= rows[j]
  void xor_row(size_t dst, size_t src);
  void xor_row(size_t dst, const BitVector& v);
  void swap_rows(size_t i, size_t j);

  BitMatrix transposed() const;
  BitMatrix operator^(const BitMatrix& o) const;
  BitMatrix& operator^=(const BitMatrix& o);

  // Matrix-vector product (v as a column vector).
  BitVector mul(const BitVector& v) const;
  // Row vector times matrix: result_j = sum_i v_i * M[i][j].
  BitVector mul_left(const BitVector& v) const;

  BitMatrix submatrix(size_t row0, size_t col0, size_t nrows, size_t ncols) const;
  BitMatrix select_rows(const std::vector<size_t>& idx) const;
  BitMatrix select_cols(const std::vector<size_t>& idx) const;
  // Block stacking.
  BitMatrix vstack(const BitMatrix& below) const;
  BitMatrix hstack(const BitMatrix& right) const;

  bool is_zero() const;
  bool is_symmetric() const;
  std::string to_text() const;

  const uint64_t* row_words(size_t i) const { return &w_[i * wpr_]; }
  uint64_t* row_words(size_t i) { return &w_[i * wpr_]; }
  size_t words_per_row() const { return wpr_; }

 private:
  size_t r_ = 0, c_ = 0, wpr_ = 0;
  std::vector<uint64_t> w_;
};

// C = A * B. Throws std::invalid_argument on dimension mismatch.
BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b,
                  MulKernel kernel = MulKernel::Cubic);

// ---------------------------------------------------------------------------
// Factorizations and solving

// L * S * P = M with L unit lower triangular (rows x rows), S (rows x cols)
// such that deleting its zero rows leaves an upper triangular matrix with
// unit diagonal, and P a cols x cols column permutation. Pivots are chosen
// as the first nonzero column scanning left to right.
struct LspFactors {
  BitMatrix l;  // rows x rows, unit lower triangular
  BitMatrix s;  // rows x cols
  // Column permutation as a vector: P[j][perm[j]] = 1, i.e. the j-th column
  // of S corresponds to column perm[j] of M.
  std::vector<size_t> perm;
  size_t rank = 0;
  std::vector<size_t> pivot_rows;  // in discovery (top-down) order
  std::vector<size_t> pivot_cols;  // original column of the j-th pivot
};

LspFactors lsp_factorize(const BitMatrix& m);

// Returns the permutation matrix for LspFactors::perm.
BitMatrix permutation_matrix(const std::vector<size_t>& perm);

// A matrix G with C * G * C = C. Rectangular inputs with more rows than
// columns are handled by computing the generalized inverse of the transpose
// and transposing back.
BitMatrix generalized_inverse(const BitMatrix& c);

// Dense Gauss-Jordan inverse; throws std::invalid_argument if singular.
BitMatrix inverse(const BitMatrix& m);

size_t rank(const BitMatrix& m);

// Indices of a maximal independent set of columns, first occurrence wins.
std::vector<size_t> column_basis(const BitMatrix& m);

// ---------------------------------------------------------------------------
// Affine subspaces

// The set { basis * x + offset : x in GF(2)^k } inside GF(2)^ambient.
// The basis columns are kept linearly independent, so the set has exactly
// 2^k elements with k = basis.cols().
struct AffineSubspace {
  BitMatrix basis;   // ambient x k
  BitVector offset;  // length ambient

  size_t ambient_dim() const { return offset.size(); }
  size_t dim() const { return basis.cols(); }
  bool contains(const BitVector& v) const;
  // All 2^dim elements; throws if dim > 24.
  std::vector<BitVector> enumerate() const;
};

// Solution set of C x = d, or nullopt when inconsistent.
std::optional<AffineSubspace> solve_linear(const BitMatrix& c, const BitVector& d);

BitVector sample_uniform(const AffineSubspace& s, Rng& rng);

}  // namespace gsim
