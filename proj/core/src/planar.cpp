#include "gsim/planar.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gsim {

namespace {

void check_grid_bases(const std::string& bases, size_t n) {
  if (bases.size() != n)
    throw std::invalid_argument("grid: bases length must be side^2");
  for (char c : bases)
    if (c != 'X' && c != 'Y' && c != 'Z')
      throw std::invalid_argument("grid: basis must be one of X, Y, Z");
}

size_t wire_position(const std::vector<size_t>& wires, size_t w) {
  auto it = std::find(wires.begin(), wires.end(), w);
  if (it == wires.end()) throw std::logic_error("grid: qubit not live");
  return size_t(it - wires.begin());
}

// Measures the listed grid vertices (in their requested bases) out of a
// tableau whose qubit i holds grid vertex wires[i], records the outcomes,
// and drops the vertices from the wire list.
void measure_vertices(Tableau& t, std::vector<size_t>& wires,
                      const std::vector<size_t>& verts,
                      const std::string& all_bases, BitVector& outcomes,
                      Rng& rng) {
  if (verts.empty()) return;
  std::vector<size_t> pos;
  std::string b;
  for (size_t v : verts) {
    pos.push_back(wire_position(wires, v));
    b.push_back(all_bases[v]);
  }
  MeasurementResult r = measure_bases(t, pos, b, MeasureMode::Sample, rng);
  for (size_t i = 0; i < verts.size(); ++i) outcomes.set(verts[i], r.outcomes.get(i));
  std::vector<size_t> remaining;
  for (size_t w : wires)
    if (std::find(verts.begin(), verts.end(), w) == verts.end())
      remaining.push_back(w);
  wires = std::move(remaining);
}

}  // namespace

void GridSpec::validate() const {
  if (side == 0) throw std::invalid_argument("grid: side must be positive");
  check_grid_bases(bases, side * side);
}

// ---------------------------------------------------------------------------
// Naive: whole grid in one tableau, one measurement at a time.

GridSample grid_naive(const GridSpec& spec, Rng& rng) {
  spec.validate();
  size_t l = spec.side, n = l * l;
  Tableau t = Tableau::plus_state(n);
  apply_cz_batch(t, Graph::grid(l).adjacency_matrix());

  GridSample s;
  s.outcomes = BitVector(n);
  s.peak_live_qubits = n;
  rotate_bases(t, spec.bases);
  SequentialMeasurer meas(t);
  for (size_t q = 0; q < n; ++q) {
    auto bit = meas.measure(q, MeasureMode::Sample, rng);
    s.outcomes.set(q, *bit);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sweep: two live columns.

GridSample grid_sweep(const GridSpec& spec, Rng& rng) {
  spec.validate();
  size_t l = spec.side;
  GridSample s;
  s.outcomes = BitVector(l * l);

  auto column = [&](size_t c) {
    std::vector<size_t> v(l);
    for (size_t r = 0; r < l; ++r) v[r] = r * l + c;
    return v;
  };
  auto add_column = [&](Tableau& t, std::vector<size_t>& wires, size_t c) {
    t = tensor(t, Tableau::plus_state(l));
    for (size_t v : column(c)) wires.push_back(v);
    for (size_t r = 0; r + 1 < l; ++r)  // vertical edges inside the column
      apply_gate(t, Gate::CZ,
                 {wire_position(wires, r * l + c),
                  wire_position(wires, (r + 1) * l + c)});
    if (c > 0)
      for (size_t r = 0; r < l; ++r)  // horizontal edges to the previous column
        apply_gate(t, Gate::CZ,
                   {wire_position(wires, r * l + c - 1),
                    wire_position(wires, r * l + c)});
  };

  Tableau t(0);
  std::vector<size_t> wires;
  add_column(t, wires, 0);
  s.peak_live_qubits = t.num_qubits();
  for (size_t c = 1; c < l; ++c) {
    add_column(t, wires, c);
    s.peak_live_qubits = std::max(s.peak_live_qubits, t.num_qubits());
    measure_vertices(t, wires, column(c - 1), spec.bases, s.outcomes, rng);
  }
  measure_vertices(t, wires, column(l - 1), spec.bases, s.outcomes, rng);
  return s;
}

// ---------------------------------------------------------------------------
// Recursive: split the longer dimension, keep only perimeters.

namespace {

struct RectState {
  Tableau t{0};
  std::vector<size_t> wires;  // grid vertex per tableau qubit
};

struct RecContext {
  const GridSpec* spec = nullptr;
  Rng* rng = nullptr;
  BitVector outcomes;
  size_t live = 0, peak = 0;
};

// Simulates the subgrid [r0, r1) x [c0, c1): measures every interior vertex
// and returns the post-measurement state on the rectangle's perimeter.
RectState simulate_rect(RecContext& ctx, size_t r0, size_t r1, size_t c0,
                        size_t c1) {
  size_t l = ctx.spec->side;
  size_t h = r1 - r0, w = c1 - c0;
  auto on_perimeter = [&](size_t v) {
    size_t r = v / l, c = v % l;
    return r == r0 || r == r1 - 1 || c == c0 || c == c1 - 1;
  };

  RectState s;
  if (std::min(h, w) <= 4) {
    // Base case: prepare the whole rectangle directly.
    s.t = Tableau::plus_state(h * w);
    for (size_t r = r0; r < r1; ++r)
      for (size_t c = c0; c < c1; ++c) s.wires.push_back(r * l + c);
    for (size_t r = r0; r < r1; ++r)
      for (size_t c = c0; c < c1; ++c) {
        size_t q = (r - r0) * w + (c - c0);
        if (c + 1 < c1) apply_gate(s.t, Gate::CZ, {q, q + 1});
        if (r + 1 < r1) apply_gate(s.t, Gate::CZ, {q, q + w});
      }
    ctx.live += h * w;
    ctx.peak = std::max(ctx.peak, ctx.live);
  } else {
    RectState a, b;
    std::vector<std::pair<size_t, size_t>> seam;
    if (h >= w) {
      size_t rm = r0 + h / 2;
      a = simulate_rect(ctx, r0, rm, c0, c1);
      b = simulate_rect(ctx, rm, r1, c0, c1);
      for (size_t c = c0; c < c1; ++c)
        seam.emplace_back((rm - 1) * l + c, rm * l + c);
    } else {
      size_t cm = c0 + w / 2;
      a = simulate_rect(ctx, r0, r1, c0, cm);
      b = simulate_rect(ctx, r0, r1, cm, c1);
      for (size_t r = r0; r < r1; ++r)
        seam.emplace_back(r * l + cm - 1, r * l + cm);
    }
    s.t = tensor(a.t, b.t);
    s.wires = a.wires;
    for (size_t v : b.wires) s.wires.push_back(v);
    for (auto& [u, v] : seam)
      apply_gate(s.t, Gate::CZ,
                 {wire_position(s.wires, u), wire_position(s.wires, v)});
  }

  std::vector<size_t> interior;
  for (size_t v : s.wires)
    if (!on_perimeter(v)) interior.push_back(v);
  measure_vertices(s.t, s.wires, interior, ctx.spec->bases, ctx.outcomes,
                   *ctx.rng);
  ctx.live -= interior.size();
  return s;
}

}  // namespace

GridSample grid_recursive(const GridSpec& spec, Rng& rng) {
  spec.validate();
  size_t l = spec.side;
  RecContext ctx;
  ctx.spec = &spec;
  ctx.rng = &rng;
  ctx.outcomes = BitVector(l * l);

  RectState top = simulate_rect(ctx, 0, l, 0, l);
  std::vector<size_t> rest = top.wires;
  measure_vertices(top.t, top.wires, rest, spec.bases, ctx.outcomes, rng);

  GridSample s;
  s.outcomes = std::move(ctx.outcomes);
  s.peak_live_qubits = ctx.peak;
  return s;
}

// ---------------------------------------------------------------------------
// Planar pipelines

GssResult simulate_planar(const GssInstance& inst, Rng& rng) {
  inst.validate();
  if (!is_planar(inst.graph))
    throw std::invalid_argument("simulate_planar: graph is not planar");
  TreeDecomposition td = compute_td(inst.graph, {});
  return solve_instance(inst, &td, rng);
}

GssResult simulate_coarse(const GssInstance& inst, const CoarseGraining& cg,
                          const Graph& planar_target, Rng& rng) {
  inst.validate();
  if (!validate_coarse_graining(inst.graph, planar_target, cg))
    throw std::invalid_argument("simulate_coarse: invalid coarse-graining");
  if (!is_planar(planar_target))
    throw std::invalid_argument("simulate_coarse: target is not planar");
  TreeDecomposition coarse_td = compute_td(planar_target, {});
  TreeDecomposition td = preimage(coarse_td, cg);
  return solve_instance(inst, &td, rng);
}

// ---------------------------------------------------------------------------
// Symmetric GF(2) systems

void SymmetricSystem::validate() const {
  if (a.rows() != a.cols() || !a.is_symmetric())
    throw std::invalid_argument("solve_symmetric_f2: matrix must be symmetric");
  for (size_t i = 0; i < a.rows(); ++i)
    if (a.get(i, i))
      throw std::invalid_argument("solve_symmetric_f2: diagonal must be zero");
  if (b.size() != a.rows())
    throw std::invalid_argument("solve_symmetric_f2: length mismatch");
}

std::optional<BitVector> solve_symmetric_f2(const SymmetricSystem& sys,
                                            const TreeDecomposition* td,
                                            Rng& rng) {
  sys.validate();
  size_t n = sys.a.rows();
  Graph g(n);
  for (size_t u = 0; u < n; ++u)
    for (size_t v = u + 1; v < n; ++v)
      if (sys.a.get(u, v)) g.add_edge(u, v);

  TreeDecomposition given;
  if (td) {
    given = *td;
  } else {
    TdNode all;
    for (size_t v = 0; v < n; ++v) all.bag.push_back(v);
    given.nodes = {all};
  }
  GadgetCircuit c = build_circuit(g, normalize(g, given));

  // A stabilizer component (t, A't) of |G'> with t zero on the ancillas has
  // (A't) = A t on the data block, so forcing the data Z-components to b
  // makes the data X-components a uniformly random solution of A x = b.
  size_t n_t = c.num_qubits();
  Pattern pat = Pattern::all_free(n_t);
  for (size_t q = n; q < n_t; ++q) pat.x_part[q] = '0';
  for (size_t v = 0; v < n; ++v) pat.z_part[v] = sys.b.get(v) ? '1' : '0';

  auto p = correct_general(c, std::string(n, 'Z'), pat, rng);
  if (!p) return std::nullopt;
  return p->x.slice(0, n);
}

std::optional<BitVector> solve_planar_f2(const SymmetricSystem& sys, Rng& rng) {
  sys.validate();
  size_t n = sys.a.rows();
  Graph g(n);
  for (size_t u = 0; u < n; ++u)
    for (size_t v = u + 1; v < n; ++v)
      if (sys.a.get(u, v)) g.add_edge(u, v);
  if (!is_planar(g))
    throw std::invalid_argument("solve_planar_f2: graph is not planar");
  TreeDecomposition td = compute_td(g, {});
  return solve_symmetric_f2(sys, &td, rng);
}

}  // namespace gsim
