#include "doctest.h"
#include "gsim/f2la.hpp"

#include <map>
#include <set>

using namespace gsim;

// ---------------------------------------------------------------------------
// Independent oracles, deliberately written in the most naive way possible.

namespace {

// Triple-loop schoolbook multiplication, one bit at a time.
BitMatrix naive_mul(const BitMatrix& a, const BitMatrix& b) {
  BitMatrix c(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < b.cols(); ++j) {
      bool acc = false;
      for (size_t k = 0; k < a.cols(); ++k) acc ^= a.get(i, k) && b.get(k, j);
      c.set(i, j, acc);
    }
  return c;
}

// Plain Gaussian elimination rank, no packing.
size_t naive_rank(const BitMatrix& m) {
  std::vector<std::vector<int>> a(m.rows(), std::vector<int>(m.cols()));
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) a[i][j] = m.get(i, j);
  size_t r = 0;
  for (size_t col = 0; col < m.cols() && r < m.rows(); ++col) {
    size_t piv = r;
    while (piv < m.rows() && !a[piv][col]) ++piv;
    if (piv == m.rows()) continue;
    std::swap(a[r], a[piv]);
    for (size_t i = 0; i < m.rows(); ++i)
      if (i != r && a[i][col])
        for (size_t j = 0; j < m.cols(); ++j) a[i][j] ^= a[r][j];
    ++r;
  }
  return r;
}

// All solutions of Cx=d by brute-force enumeration (cols <= 16).
std::set<std::string> naive_solutions(const BitMatrix& c, const BitVector& d) {
  std::set<std::string> out;
  REQUIRE(c.cols() <= 16);
  for (size_t mask = 0; mask < (size_t(1) << c.cols()); ++mask) {
    BitVector x(c.cols());
    for (size_t j = 0; j < c.cols(); ++j) if ((mask >> j) & 1) x.set(j, true);
    if (c.mul(x) == d) out.insert(x.to_string());
  }
  return out;
}

std::set<std::string> as_strings(const std::vector<BitVector>& vs) {
  std::set<std::string> out;
  for (const auto& v : vs) out.insert(v.to_string());
  return out;
}

bool is_unit_lower_triangular(const BitMatrix& m) {
  if (m.rows() != m.cols()) return false;
  for (size_t i = 0; i < m.rows(); ++i) {
    if (!m.get(i, i)) return false;
    for (size_t j = i + 1; j < m.cols(); ++j)
      if (m.get(i, j)) return false;
  }
  return true;
}

// Deleting the zero rows of S must leave an upper triangular matrix with
// unit diagonal.
bool echelon_shape_ok(const BitMatrix& s) {
  size_t next = 0;
  for (size_t i = 0; i < s.rows(); ++i) {
    BitVector r = s.row(i);
    if (r.is_zero()) continue;
    if (r.first_set() != next) return false;
    ++next;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

TEST_CASE("BitVector basics") {
  BitVector v = BitVector::parse("0110010");
  CHECK(v.size() == 7);
  CHECK(v.popcount() == 3);
  CHECK(v.first_set() == 1);
  CHECK(v.to_string() == "0110010");
  v.flip(0);
  CHECK(v.get(0));
  BitVector w = BitVector::parse("1110010");
  CHECK(v == w);
  CHECK((v ^ w).is_zero());
  CHECK(BitVector::parse("101").dot(BitVector::parse("111")) == false);
  CHECK(BitVector::parse("101").dot(BitVector::parse("110")) == true);
  CHECK(BitVector::parse("10").concat(BitVector::parse("01")).to_string() == "1001");
  CHECK(v.slice(1, 3).to_string() == "110");
}

TEST_CASE("BitVector word boundaries") {
  Rng rng(7);
  for (size_t n : {63, 64, 65, 127, 128, 130}) {
    BitVector a = BitVector::random(n, rng);
    BitVector b = BitVector::random(n, rng);
    bool dot = false;
    for (size_t i = 0; i < n; ++i) dot ^= a.get(i) && b.get(i);
    CHECK(a.dot(b) == dot);
    CHECK(BitVector::parse(a.to_string()) == a);
  }
}

TEST_CASE("BitMatrix text round trip") {
  BitMatrix m = BitMatrix::parse("2 3\n101\n010\n");
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.get(0, 0));
  CHECK(!m.get(1, 0));
  CHECK(BitMatrix::parse(m.to_text()) == m);
  CHECK_THROWS_AS(BitMatrix::parse("2 3\n10\n010\n"), std::invalid_argument);
}

TEST_CASE("BitMatrix transpose and stacking") {
  Rng rng(11);
  BitMatrix m = BitMatrix::random(19, 70, rng);
  BitMatrix t = m.transposed();
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) CHECK(m.get(i, j) == t.get(j, i));
  CHECK(t.transposed() == m);
  BitMatrix v = m.vstack(m);
  CHECK(v.rows() == 38);
  CHECK(v.row(20) == m.row(1));
  BitMatrix h = m.hstack(m);
  CHECK(h.cols() == 140);
  CHECK(h.get(3, 71) == m.get(3, 1));
}

TEST_CASE("mat_mul agrees with naive oracle on random shapes") {
  Rng rng(1234);
  for (int it = 0; it < 30; ++it) {
    size_t n = 1 + rng() % 90, k = 1 + rng() % 90, m = 1 + rng() % 90;
    BitMatrix a = BitMatrix::random(n, k, rng);
    BitMatrix b = BitMatrix::random(k, m, rng);
    BitMatrix expect = naive_mul(a, b);
    CHECK(mat_mul(a, b, MulKernel::Cubic) == expect);
    CHECK(mat_mul(a, b, MulKernel::FourRussians) == expect);
  }
  CHECK_THROWS_AS(mat_mul(BitMatrix(2, 3), BitMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("mat_mul identity and associativity") {
  Rng rng(5);
  BitMatrix a = BitMatrix::random(40, 65, rng);
  CHECK(mat_mul(BitMatrix::identity(40), a) == a);
  CHECK(mat_mul(a, BitMatrix::identity(65)) == a);
  BitMatrix b = BitMatrix::random(65, 33, rng);
  BitMatrix c = BitMatrix::random(33, 20, rng);
  CHECK(mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c)));
}

TEST_CASE("lsp_factorize reconstructs the input with the required shapes") {
  Rng rng(99);
  for (int it = 0; it < 40; ++it) {
    size_t rows = 1 + rng() % 40, cols = 1 + rng() % 40;
    BitMatrix m = BitMatrix::random(rows, cols, rng);
    // Sprinkle in rank deficiency by duplicating rows.
    if (rows > 2 && (rng() & 1)) m.set_row(rows - 1, m.row(0));
    LspFactors f = lsp_factorize(m);
    CHECK(is_unit_lower_triangular(f.l));
    CHECK(echelon_shape_ok(f.s));
    CHECK(f.rank == naive_rank(m));
    BitMatrix p = permutation_matrix(f.perm);
    CHECK(mat_mul(mat_mul(f.l, f.s), p) == m);
  }
}

TEST_CASE("lsp_factorize picks first-nonzero pivots") {
  // Row 0 leads at column 2, row 1 at column 0.
  BitMatrix m = BitMatrix::parse("2 4\n0011\n1001\n");
  LspFactors f = lsp_factorize(m);
  CHECK(f.rank == 2);
  CHECK(f.pivot_cols == std::vector<size_t>{2, 0});
  CHECK(f.pivot_rows == std::vector<size_t>{0, 1});
}

TEST_CASE("lsp_factorize handles zero and empty matrices") {
  LspFactors f = lsp_factorize(BitMatrix(3, 5));
  CHECK(f.rank == 0);
  CHECK(mat_mul(mat_mul(f.l, f.s), permutation_matrix(f.perm)) == BitMatrix(3, 5));
  LspFactors g = lsp_factorize(BitMatrix(0, 0));
  CHECK(g.rank == 0);
}

TEST_CASE("generalized_inverse satisfies C g C = C on all shapes") {
  Rng rng(321);
  for (int it = 0; it < 60; ++it) {
    size_t rows = 1 + rng() % 30, cols = 1 + rng() % 30;
    BitMatrix c = BitMatrix::random(rows, cols, rng);
    if ((rng() & 3) == 0) c = BitMatrix(rows, cols);  // zero matrix
    BitMatrix g = generalized_inverse(c);
    CHECK(g.rows() == cols);
    CHECK(g.cols() == rows);
    CHECK(mat_mul(mat_mul(c, g), c) == c);
  }
}

TEST_CASE("generalized_inverse of invertible matrix is the inverse") {
  Rng rng(8);
  BitMatrix m;
  do { m = BitMatrix::random(12, 12, rng); } while (naive_rank(m) < 12);
  BitMatrix g = generalized_inverse(m);
  CHECK(mat_mul(m, g) == BitMatrix::identity(12));
  CHECK(g == inverse(m));
}

TEST_CASE("inverse throws on singular input") {
  CHECK_THROWS_AS(inverse(BitMatrix(3, 3)), std::invalid_argument);
  CHECK_THROWS_AS(inverse(BitMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("column_basis keeps the first occurrence of each new direction") {
  // col2 = col0 ^ col1, col3 independent, col4 = col3.
  BitMatrix m = BitMatrix::parse("3 5\n10100\n01100\n00011\n");
  CHECK(column_basis(m) == std::vector<size_t>{0, 1, 3});
}

TEST_CASE("column_basis spans the column space") {
  Rng rng(77);
  for (int it = 0; it < 30; ++it) {
    BitMatrix m = BitMatrix::random(1 + rng() % 25, 1 + rng() % 25, rng);
    auto idx = column_basis(m);
    CHECK(idx.size() == naive_rank(m));
    BitMatrix sub = m.select_cols(idx);
    CHECK(naive_rank(sub) == idx.size());
  }
}

TEST_CASE("solve_linear matches brute-force enumeration") {
  Rng rng(2024);
  int nonempty_seen = 0, empty_seen = 0;
  for (int it = 0; it < 80; ++it) {
    size_t rows = 1 + rng() % 8, cols = 1 + rng() % 8;
    BitMatrix c = BitMatrix::random(rows, cols, rng);
    BitVector d = BitVector::random(rows, rng);
    auto expect = naive_solutions(c, d);
    auto got = solve_linear(c, d);
    if (expect.empty()) {
      CHECK(!got.has_value());
      ++empty_seen;
    } else {
      REQUIRE(got.has_value());
      CHECK(as_strings(got->enumerate()) == expect);
      ++nonempty_seen;
    }
  }
  // Make sure the corpus exercised both branches.
  CHECK(nonempty_seen > 5);
  CHECK(empty_seen > 5);
}

TEST_CASE("solve_linear basis columns are independent") {
  Rng rng(4);
  for (int it = 0; it < 20; ++it) {
    BitMatrix c = BitMatrix::random(1 + rng() % 20, 1 + rng() % 20, rng);
    auto sol = solve_linear(c, BitVector(c.rows()));  // homogeneous: solvable
    REQUIRE(sol.has_value());
    CHECK(naive_rank(sol->basis) == sol->basis.cols());
    CHECK(sol->dim() == c.cols() - naive_rank(c));
  }
}

TEST_CASE("AffineSubspace::contains") {
  BitMatrix c = BitMatrix::parse("2 3\n110\n011\n");
  BitVector d = BitVector::parse("10");
  auto sol = solve_linear(c, d);
  REQUIRE(sol.has_value());
  for (const auto& v : sol->enumerate()) CHECK(sol->contains(v));
  CHECK(!sol->contains(BitVector::parse("000")));  // C*0 = 0 != d
}

TEST_CASE("sample_uniform covers the solution set uniformly") {
  // 2^3 = 8 solutions; chi-squared style sanity bound on counts.
  BitMatrix c = BitMatrix::parse("2 5\n11000\n00110\n");
  BitVector d = BitVector::parse("11");
  auto sol = solve_linear(c, d);
  REQUIRE(sol.has_value());
  REQUIRE(sol->dim() == 3);
  auto all = as_strings(sol->enumerate());
  Rng rng(555);
  std::map<std::string, int> counts;
  const int N = 8000;
  for (int i = 0; i < N; ++i) {
    BitVector v = sample_uniform(*sol, rng);
    std::string s = v.to_string();
    CHECK(all.count(s) == 1);
    counts[s]++;
  }
  CHECK(counts.size() == 8);
  for (auto& [k, v] : counts) {
    CHECK(v > N / 8 - 250);
    CHECK(v < N / 8 + 250);
  }
}

TEST_CASE("sample_uniform on a zero-dimensional space returns the offset") {
  BitMatrix c = BitMatrix::identity(4);
  BitVector d = BitVector::parse("1010");
  auto sol = solve_linear(c, d);
  REQUIRE(sol.has_value());
  CHECK(sol->dim() == 0);
  Rng rng(1);
  CHECK(sample_uniform(*sol, rng) == d);
}
