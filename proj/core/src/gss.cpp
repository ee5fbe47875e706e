#include "gsim/gss.hpp"

#include <json.hpp>

#include <algorithm>
#include <iterator>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace gsim {

namespace {

using nlohmann::json;

std::vector<size_t> sorted_difference(const std::vector<size_t>& a,
                                      const std::vector<size_t>& b) {
  std::vector<size_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

size_t wire_position(const std::vector<size_t>& wires, size_t w) {
  auto it = std::find(wires.begin(), wires.end(), w);
  if (it == wires.end()) throw std::logic_error("gss: wire not live at node");
  return size_t(it - wires.begin());
}

// Transforms the (x, z) bits of one qubit's Pauli component under the basis
// rotation applied before measuring in that basis: 'X' measurements rotate
// by H (X <-> Z), 'Y' measurements by the Y-basis change (X -> Y -> Z -> X),
// 'Z' measurements need no rotation.
void conjugate_bit_pair(char basis, bool& x, bool& z) {
  switch (basis) {
    case 'Z':
      return;
    case 'X':
      std::swap(x, z);
      return;
    case 'Y': {
      bool nx = x ^ z, nz = x;
      x = nx;
      z = nz;
      return;
    }
    default:
      throw std::invalid_argument("gss: basis must be one of X, Y, Z");
  }
}

void check_bases(const std::string& bases, size_t n) {
  if (bases.size() != n)
    throw std::invalid_argument("gss: bases length does not match vertex count");
  for (char c : bases)
    if (c != 'X' && c != 'Y' && c != 'Z')
      throw std::invalid_argument("gss: basis must be one of X, Y, Z");
}

}  // namespace

// ---------------------------------------------------------------------------
// GssInstance

GssInstance GssInstance::from_json(const std::string& text) {
  json j = json::parse(text);
  GssInstance inst;
  inst.graph = Graph::from_json(j.at("graph").dump());
  inst.bases = j.at("bases").get<std::string>();
  std::map<size_t, bool> post;
  if (j.contains("postselect") && !j["postselect"].is_null()) {
    for (auto& [key, val] : j["postselect"].items()) {
      size_t v = std::stoul(key);
      int bit = val.get<int>();
      if (bit != 0 && bit != 1)
        throw std::invalid_argument("gss: postselect bits must be 0 or 1");
      if (!post.emplace(v, bit == 1).second)
        throw std::invalid_argument("gss: duplicate postselected vertex");
    }
  }
  inst.target_outcomes = BitVector(post.size());
  size_t i = 0;
  for (auto& [v, bit] : post) {
    inst.postselected.push_back(v);
    inst.target_outcomes.set(i++, bit);
  }
  inst.validate();
  return inst;
}

std::string GssInstance::to_json() const {
  json j;
  j["graph"] = json::parse(graph.to_json());
  j["bases"] = bases;
  json post = json::object();
  for (size_t i = 0; i < postselected.size(); ++i)
    post[std::to_string(postselected[i])] = target_outcomes.get(i) ? 1 : 0;
  j["postselect"] = post;
  return j.dump();
}

void GssInstance::validate() const {
  size_t n = graph.num_vertices();
  check_bases(bases, n);
  if (!std::is_sorted(postselected.begin(), postselected.end()) ||
      std::adjacent_find(postselected.begin(), postselected.end()) !=
          postselected.end())
    throw std::invalid_argument("gss: postselected set must be sorted and unique");
  for (size_t v : postselected)
    if (v >= n) throw std::invalid_argument("gss: postselected vertex out of range");
  if (target_outcomes.size() != postselected.size())
    throw std::invalid_argument("gss: one target bit per postselected vertex required");
}

// ---------------------------------------------------------------------------
// Circuit compilation

std::vector<size_t> GadgetNode::outputs() const {
  std::vector<size_t> out;
  for (size_t w : wires)
    if (std::find(measured.begin(), measured.end(), w) == measured.end())
      out.push_back(w);
  return out;
}

GadgetCircuit build_circuit(const Graph& g, const TreeDecomposition& t) {
  TreeDecomposition td = t;
  label_kinds(td);  // throws when not nice
  if (!td.nodes[td.root].bag.empty())
    throw std::invalid_argument("build_circuit: root bag must be empty");
  TdDiagnostics diag = validate_td(g, td);
  if (!diag.ok())
    throw std::invalid_argument("build_circuit: invalid tree decomposition");

  size_t n = g.num_vertices();
  GadgetCircuit c;
  c.nodes.resize(td.nodes.size());
  c.root = td.root;
  c.n_data = n;

  // Construction uses temporary wire ids; they are relabeled at the end so
  // that the surviving copy of vertex v is qubit v and ancillas follow.
  size_t next_wire = 0;
  std::vector<size_t> tmp_vertex;           // temporary wire -> vertex
  std::vector<size_t> ancilla_order;        // temporary ids, measurement order
  std::vector<size_t> cz_seen(g.num_edges(), 0);
  auto edge_index = [&] {
    std::map<std::pair<size_t, size_t>, size_t> idx;
    size_t i = 0;
    for (auto& e : g.edges()) idx[e] = i++;
    return idx;
  }();

  // Returns the bag's vertex -> wire map, sorted by vertex.
  auto build = [&](auto&& self, size_t ni) -> std::map<size_t, size_t> {
    const TdNode& tn = td.nodes[ni];
    GadgetNode& gn = c.nodes[ni];
    gn.kind = tn.kind;
    gn.children = tn.children;
    switch (tn.kind) {
      case TdKind::Introduce: {
        std::map<size_t, size_t> vw;
        std::vector<size_t> child_bag;
        if (!tn.children.empty()) {
          vw = self(self, tn.children[0]);
          gn.wires = c.nodes[tn.children[0]].outputs();
          child_bag = td.nodes[tn.children[0]].bag;
        }
        for (size_t v : sorted_difference(tn.bag, child_bag)) {
          size_t w = next_wire++;
          tmp_vertex.push_back(v);
          gn.introduced.push_back(w);
          gn.wires.push_back(w);
          vw[v] = w;
        }
        return vw;
      }
      case TdKind::Forget: {
        auto vw = self(self, tn.children[0]);
        gn.wires = c.nodes[tn.children[0]].outputs();
        const std::vector<size_t>& child_bag = td.nodes[tn.children[0]].bag;
        std::vector<size_t> gone = sorted_difference(child_bag, tn.bag);
        // Every graph edge inside the child bag with a leaving endpoint gets
        // its CZ here; this is the unique such node per edge.
        for (size_t u : child_bag) {
          for (size_t v : g.neighbors(u)) {
            if (u >= v) continue;
            if (!std::binary_search(child_bag.begin(), child_bag.end(), v)) continue;
            bool u_gone = std::binary_search(gone.begin(), gone.end(), u);
            bool v_gone = std::binary_search(gone.begin(), gone.end(), v);
            if (!u_gone && !v_gone) continue;
            gn.cz_edges.emplace_back(vw.at(u), vw.at(v));
            ++cz_seen[edge_index.at({u, v})];
          }
        }
        for (size_t v : gone) {
          gn.measured.push_back(vw.at(v));
          vw.erase(v);
        }
        return vw;
      }
      case TdKind::Merge: {
        auto vw1 = self(self, tn.children[0]);
        auto vw2 = self(self, tn.children[1]);
        gn.wires = c.nodes[tn.children[0]].outputs();
        for (size_t w : c.nodes[tn.children[1]].outputs()) gn.wires.push_back(w);
        std::map<size_t, size_t> vw = vw2;
        for (auto& [v, w1] : vw1) {
          auto it = vw2.find(v);
          if (it == vw2.end()) {
            vw[v] = w1;
            continue;
          }
          // Fuse the copies: CNOT from the second child's copy onto the
          // first child's, then measure the first child's copy, which
          // becomes an ancilla.
          gn.cnots.emplace_back(it->second, w1);
          gn.measured.push_back(w1);
          ancilla_order.push_back(w1);
        }
        return vw;
      }
      default:
        throw std::logic_error("build_circuit: unlabeled node");
    }
  };
  auto root_map = build(build, td.root);
  if (!root_map.empty())
    throw std::logic_error("build_circuit: live wires left at the root");

  for (size_t cnt : cz_seen)
    if (cnt != 1) throw std::logic_error("build_circuit: edge CZ count is not one");

  // Relabel: surviving copy of vertex v -> v, ancillas -> n, n+1, ...
  c.n_ancilla = ancilla_order.size();
  size_t n_t = next_wire;
  std::vector<size_t> relabel(n_t, size_t(-1));
  for (size_t i = 0; i < ancilla_order.size(); ++i)
    relabel[ancilla_order[i]] = n + i;
  std::vector<bool> vertex_taken(n, false);
  for (size_t w = 0; w < n_t; ++w) {
    if (relabel[w] != size_t(-1)) continue;
    size_t v = tmp_vertex[w];
    if (vertex_taken[v])
      throw std::logic_error("build_circuit: vertex has two surviving copies");
    vertex_taken[v] = true;
    relabel[w] = v;
  }
  for (size_t v = 0; v < n; ++v)
    if (!vertex_taken[v])
      throw std::logic_error("build_circuit: vertex has no surviving copy");
  c.wire_vertex.resize(n_t);
  for (size_t w = 0; w < n_t; ++w) c.wire_vertex[relabel[w]] = tmp_vertex[w];
  for (GadgetNode& gn : c.nodes) {
    for (size_t& w : gn.wires) w = relabel[w];
    for (size_t& w : gn.introduced) w = relabel[w];
    for (size_t& w : gn.measured) w = relabel[w];
    for (auto& [a, b] : gn.cz_edges) { a = relabel[a]; b = relabel[b]; }
    for (auto& [a, b] : gn.cnots) { a = relabel[a]; b = relabel[b]; }
  }

  if (double(n_t) > norm_p(td, 1) + 1e-9)
    throw std::logic_error("build_circuit: qubit count exceeds the bag-size sum");
  size_t gates = 0;
  for (const GadgetNode& gn : c.nodes)
    gates += gn.cz_edges.size() + gn.cnots.size();
  if (gates != g.num_edges() + c.n_ancilla)
    throw std::logic_error("build_circuit: gate count mismatch");
  return c;
}

// ---------------------------------------------------------------------------
// G'

Graph derive_gprime(const GadgetCircuit& c) {
  size_t n_t = c.num_qubits();
  std::vector<std::set<size_t>> adj(n_t);
  auto toggle = [&](size_t u, size_t v) {
    if (!adj[u].erase(v)) adj[u].insert(v);
    if (!adj[v].erase(u)) adj[v].insert(u);
  };
  // Process gadgets in execution order. A CZ toggles its edge. A CNOT with
  // control c and target t maps the graph state so that every neighbor of t
  // toggles its edge to c; this is the CZ-past-CNOT rewriting, valid as long
  // as c and t are never adjacent (the merge gadget guarantees it).
  auto walk = [&](auto&& self, size_t ni) -> void {
    const GadgetNode& gn = c.nodes[ni];
    for (size_t ch : gn.children) self(self, ch);
    for (auto& [u, v] : gn.cz_edges) toggle(u, v);
    for (auto& [ctrl, tgt] : gn.cnots) {
      if (adj[tgt].count(ctrl))
        throw std::logic_error("derive_gprime: control adjacent to merge ancilla");
      for (size_t a : std::vector<size_t>(adj[tgt].begin(), adj[tgt].end()))
        toggle(a, ctrl);
    }
  };
  walk(walk, c.root);

  Graph gp(n_t);
  for (size_t u = 0; u < n_t; ++u)
    for (size_t v : adj[u])
      if (u < v) gp.add_edge(u, v);
  return gp;
}

// ---------------------------------------------------------------------------
// Sampling subroutine

BitVector sample_subroutine(const GadgetCircuit& c, const std::string& bases,
                            Rng& rng) {
  check_bases(bases, c.n_data);
  BitVector y(c.num_qubits());

  struct NodeState {
    Tableau t{0};
    std::vector<size_t> wires;
  };
  auto eval = [&](auto&& self, size_t ni) -> NodeState {
    const GadgetNode& gn = c.nodes[ni];
    switch (gn.kind) {
      case TdKind::Introduce: {
        NodeState s;
        if (!gn.children.empty()) s = self(self, gn.children[0]);
        if (!gn.introduced.empty()) {
          s.t = tensor(s.t, Tableau::plus_state(gn.introduced.size()));
          for (size_t w : gn.introduced) s.wires.push_back(w);
        }
        return s;
      }
      case TdKind::Forget: {
        NodeState s = self(self, gn.children[0]);
        for (auto& [u, v] : gn.cz_edges)
          apply_gate(s.t, Gate::CZ,
                     {wire_position(s.wires, u), wire_position(s.wires, v)});
        std::vector<size_t> pos;
        std::string b;
        for (size_t w : gn.measured) {
          pos.push_back(wire_position(s.wires, w));
          b.push_back(bases[c.wire_vertex[w]]);
        }
        MeasurementResult r = measure_bases(s.t, pos, b, MeasureMode::Sample, rng);
        for (size_t i = 0; i < gn.measured.size(); ++i)
          y.set(gn.measured[i], r.outcomes.get(i));
        s.wires = gn.outputs();
        return s;
      }
      case TdKind::Merge: {
        NodeState s1 = self(self, gn.children[0]);
        NodeState s2 = self(self, gn.children[1]);
        NodeState s;
        s.t = tensor(s1.t, s2.t);
        s.wires = s1.wires;
        for (size_t w : s2.wires) s.wires.push_back(w);
        for (auto& [ctrl, tgt] : gn.cnots)
          apply_gate(s.t, Gate::CNOT,
                     {wire_position(s.wires, ctrl), wire_position(s.wires, tgt)});
        std::vector<size_t> pos;
        for (size_t w : gn.measured) pos.push_back(wire_position(s.wires, w));
        MeasurementResult r = measure_z_subset(s.t, pos, MeasureMode::Sample, rng);
        for (size_t i = 0; i < gn.measured.size(); ++i)
          y.set(gn.measured[i], r.outcomes.get(i));
        s.wires = gn.outputs();
        return s;
      }
      default:
        throw std::logic_error("sample_subroutine: unlabeled node");
    }
  };
  NodeState top = eval(eval, c.root);
  if (top.t.num_qubits() != 0)
    throw std::logic_error("sample_subroutine: unmeasured wires at the root");
  return y;
}

// ---------------------------------------------------------------------------
// Patterns

bool Pattern::respected_by(const Pauli& p) const {
  if (x_part.size() != p.num_qubits() || z_part.size() != p.num_qubits())
    return false;
  for (size_t q = 0; q < p.num_qubits(); ++q) {
    if (x_part[q] != '*' && p.x.get(q) != (x_part[q] == '1')) return false;
    if (z_part[q] != '*' && p.z.get(q) != (z_part[q] == '1')) return false;
  }
  return true;
}

Pattern build_pattern(const GssInstance& inst, const GadgetCircuit& c,
                      const BitVector& y) {
  size_t n_t = c.num_qubits();
  if (y.size() != n_t)
    throw std::invalid_argument("build_pattern: outcome length mismatch");
  Pattern p = Pattern::all_free(n_t);
  for (size_t i = c.n_data; i < n_t; ++i)
    p.x_part[i] = y.get(i) ? '1' : '0';
  for (size_t i = 0; i < inst.postselected.size(); ++i) {
    size_t v = inst.postselected[i];
    p.x_part[v] = (y.get(v) ^ inst.target_outcomes.get(i)) ? '1' : '0';
  }
  return p;
}

// ---------------------------------------------------------------------------
// General correction

namespace {

// Affine set of Pauli (x|z) bit components over k live wires: coordinates
// 0..k-1 are the x bits (in wire-list order), k..2k-1 the z bits. The set is
// { basis * t + offset }.
struct Space {
  BitMatrix basis;   // 2k x dim
  BitVector offset;  // 2k
  size_t k = 0;
};

Space full_x_space(size_t k) {
  Space s;
  s.k = k;
  s.offset = BitVector(2 * k);
  s.basis = BitMatrix(2 * k, k);
  for (size_t i = 0; i < k; ++i) s.basis.set(i, i, true);
  return s;
}

// Keeps the listed wire positions (x and z coordinates) and drops any
// linearly dependent basis columns the row deletion created.
Space restrict_space(const Space& s, const std::vector<size_t>& keep) {
  std::vector<size_t> rows;
  for (size_t p : keep) rows.push_back(p);
  for (size_t p : keep) rows.push_back(s.k + p);
  Space r;
  r.k = keep.size();
  r.basis = s.basis.select_rows(rows);
  r.offset = BitVector(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) r.offset.set(i, s.offset.get(rows[i]));
  std::vector<size_t> cb = column_basis(r.basis);
  if (cb.size() < r.basis.cols()) r.basis = r.basis.select_cols(cb);
  return r;
}

// Block-diagonal product over the concatenated wire lists.
Space direct_product(const Space& a, const Space& b) {
  Space s;
  s.k = a.k + b.k;
  size_t da = a.basis.cols(), db = b.basis.cols();
  s.basis = BitMatrix(2 * s.k, da + db);
  s.offset = BitVector(2 * s.k);
  auto put = [&](const Space& src, size_t row0, size_t col0, bool zhalf) {
    for (size_t i = 0; i < src.k; ++i) {
      size_t srow = (zhalf ? src.k : 0) + i;
      for (size_t j = 0; j < src.basis.cols(); ++j)
        s.basis.set(row0 + i, col0 + j, src.basis.get(srow, j));
      s.offset.set(row0 + i, src.offset.get(srow));
    }
  };
  put(a, 0, 0, false);
  put(b, a.k, da, false);
  put(a, s.k, 0, true);
  put(b, s.k + a.k, da, true);
  return s;
}

// Conjugates every basis column and the offset forward through the unitary.
void conjugate_space(Space& s, const Tableau& u) {
  if (s.k == 0) return;
  size_t dim = s.basis.cols();
  PauliBlock block(dim + 1, s.k);
  block.rows = s.basis.transposed().vstack(BitMatrix::from_rows({s.offset}));
  PauliBlock out = conjugate_many(u, block);
  BitMatrix rows = out.rows;
  s.offset = rows.row(dim);
  s.basis = rows.submatrix(0, 0, dim, 2 * s.k).transposed();
}

// Intersects with { coordinate row = bit } constraints; false when empty.
bool enforce(Space& s, const std::vector<std::pair<size_t, bool>>& constraints) {
  if (constraints.empty()) return true;
  std::vector<size_t> rows;
  BitVector d(constraints.size());
  for (size_t i = 0; i < constraints.size(); ++i) {
    rows.push_back(constraints[i].first);
    d.set(i, constraints[i].second ^ s.offset.get(constraints[i].first));
  }
  BitMatrix cmat = s.basis.select_rows(rows);
  auto sol = solve_linear(cmat, d);
  if (!sol) return false;
  s.offset ^= s.basis.mul(sol->offset);
  s.basis = sol->basis.cols() ? mat_mul(s.basis, sol->basis)
                              : BitMatrix(2 * s.k, 0);
  return true;
}

BitVector sample_space(const Space& s, Rng& rng) {
  AffineSubspace a{s.basis, s.offset};
  return sample_uniform(a, rng);
}

// Pushes the bit components of a sampled Pauli backward through the node
// unitary: row * M^{-1} with M^{-1} = Omega M^T Omega, i.e. swap the x/z
// halves, multiply by M, swap back.
BitVector push_backward(const BitVector& bits, const Tableau& u) {
  size_t k = u.num_qubits();
  auto swap_halves = [&](const BitVector& v) {
    BitVector r(2 * k);
    for (size_t i = 0; i < k; ++i) {
      r.set(i, v.get(k + i));
      r.set(k + i, v.get(i));
    }
    return r;
  };
  return swap_halves(u.m().mul(swap_halves(bits)));
}

}  // namespace

std::optional<Pauli> correct_general(const GadgetCircuit& c,
                                     const std::string& bases,
                                     const Pattern& pattern, Rng& rng,
                                     StabilizerChain* chain) {
  size_t n_t = c.num_qubits();
  check_bases(bases, c.n_data);
  if (pattern.x_part.size() != n_t || pattern.z_part.size() != n_t)
    throw std::invalid_argument("correct_general: pattern length mismatch");

  std::vector<Space> spaces(c.nodes.size());
  std::vector<Tableau> unitaries(c.nodes.size(), Tableau(0));
  if (chain) chain->assign(c.nodes.size(), ChainEntry{{}, {}, {}, Tableau(0)});

  // Constraints the pattern imposes on the wires measured at this node,
  // as (coordinate row, bit) pairs in the node's space.
  auto pattern_constraints = [&](const GadgetNode& gn) {
    std::vector<std::pair<size_t, bool>> cs;
    size_t k = gn.wires.size();
    for (size_t w : gn.measured) {
      size_t j = wire_position(gn.wires, w);
      if (pattern.x_part[w] != '*') cs.emplace_back(j, pattern.x_part[w] == '1');
      if (pattern.z_part[w] != '*') cs.emplace_back(k + j, pattern.z_part[w] == '1');
    }
    return cs;
  };

  // Bottom-up: the affine space of stabilizer bit components of the partial
  // circuit's state over each gadget's live wires, with the pattern already
  // enforced on every coordinate measured so far.
  bool empty = false;
  auto up = [&](auto&& self, size_t ni) -> void {
    const GadgetNode& gn = c.nodes[ni];
    for (size_t ch : gn.children) {
      self(self, ch);
      if (empty) return;
    }
    Space s;
    switch (gn.kind) {
      case TdKind::Introduce: {
        if (gn.children.empty()) {
          s = full_x_space(gn.introduced.size());
        } else {
          const GadgetNode& cn = c.nodes[gn.children[0]];
          std::vector<size_t> keep;
          for (size_t w : cn.outputs()) keep.push_back(wire_position(cn.wires, w));
          s = restrict_space(spaces[gn.children[0]], keep);
          if (!gn.introduced.empty())
            s = direct_product(s, full_x_space(gn.introduced.size()));
        }
        unitaries[ni] = Tableau::identity(gn.wires.size());
        break;
      }
      case TdKind::Forget: {
        const GadgetNode& cn = c.nodes[gn.children[0]];
        std::vector<size_t> keep;
        for (size_t w : cn.outputs()) keep.push_back(wire_position(cn.wires, w));
        s = restrict_space(spaces[gn.children[0]], keep);
        Tableau u = Tableau::identity(gn.wires.size());
        for (auto& [a, b] : gn.cz_edges)
          apply_gate(u, Gate::CZ,
                     {wire_position(gn.wires, a), wire_position(gn.wires, b)});
        for (size_t w : gn.measured) {
          char bch = bases[c.wire_vertex[w]];
          if (bch == 'X')
            apply_gate(u, Gate::H, {wire_position(gn.wires, w)});
          else if (bch == 'Y')
            apply_gate(u, Gate::YBasisChange, {wire_position(gn.wires, w)});
        }
        unitaries[ni] = u;
        conjugate_space(s, u);
        break;
      }
      case TdKind::Merge: {
        auto restricted = [&](size_t ci) {
          const GadgetNode& cn = c.nodes[ci];
          std::vector<size_t> keep;
          for (size_t w : cn.outputs()) keep.push_back(wire_position(cn.wires, w));
          return restrict_space(spaces[ci], keep);
        };
        s = direct_product(restricted(gn.children[0]), restricted(gn.children[1]));
        Tableau u = Tableau::identity(gn.wires.size());
        for (auto& [ctrl, tgt] : gn.cnots)
          apply_gate(u, Gate::CNOT,
                     {wire_position(gn.wires, ctrl), wire_position(gn.wires, tgt)});
        unitaries[ni] = u;
        conjugate_space(s, u);
        break;
      }
      default:
        throw std::logic_error("correct_general: unlabeled node");
    }
    s.k = gn.wires.size();
    if (!enforce(s, pattern_constraints(gn))) {
      empty = true;
      return;
    }
    spaces[ni] = s;
    if (chain) (*chain)[ni] = ChainEntry{gn.wires, s.basis, s.offset, unitaries[ni]};
  };
  up(up, c.root);
  if (empty) return std::nullopt;

  // Top-down: sample at the root, push the sampled components backward
  // through each gadget's unitary, and resample every child consistently
  // with the components landing on its surviving wires.
  BitVector x(n_t), z(n_t);
  auto down = [&](auto&& self, size_t ni,
                  const std::vector<std::pair<size_t, std::pair<bool, bool>>>&
                      required) -> void {
    const GadgetNode& gn = c.nodes[ni];
    size_t k = gn.wires.size();
    Space s = spaces[ni];
    std::vector<std::pair<size_t, bool>> cs;
    for (auto& [w, bits] : required) {
      size_t j = wire_position(gn.wires, w);
      cs.emplace_back(j, bits.first);
      cs.emplace_back(k + j, bits.second);
    }
    if (!enforce(s, cs))
      throw std::logic_error("correct_general: inconsistent back-substitution");
    BitVector elem = sample_space(s, rng);
    for (size_t w : gn.measured) {
      size_t j = wire_position(gn.wires, w);
      x.set(w, elem.get(j));
      z.set(w, elem.get(k + j));
    }
    BitVector back =
        gn.kind == TdKind::Introduce ? elem : push_backward(elem, unitaries[ni]);
    for (size_t ch : gn.children) {
      std::vector<std::pair<size_t, std::pair<bool, bool>>> req;
      for (size_t w : c.nodes[ch].outputs()) {
        size_t j = wire_position(gn.wires, w);
        req.emplace_back(w, std::make_pair(back.get(j), back.get(k + j)));
      }
      self(self, ch, req);
    }
  };
  down(down, c.root, {});

  Pauli p(n_t);
  p.x = x;
  p.z = z;
  p.alpha = x.dot(z);
  return p;
}

// ---------------------------------------------------------------------------
// Simple correction and uniformization

Pauli correct_simple(const Graph& gprime, const std::string& bases,
                     const BitVector& y) {
  size_t n_t = gprime.num_vertices();
  size_t n = bases.size();
  check_bases(bases, n);
  if (n > n_t || y.size() != n_t)
    throw std::invalid_argument("correct_simple: size mismatch");
  Pauli p(n_t);
  p.x = y;
  for (size_t v = 0; v < n_t; ++v) {
    bool b = false;
    for (size_t u : gprime.neighbors(v)) b ^= y.get(u);
    p.z.set(v, b);
  }
  for (size_t v = 0; v < n; ++v) {
    bool xb = p.x.get(v), zb = p.z.get(v);
    conjugate_bit_pair(bases[v], xb, zb);
    p.x.set(v, xb);
    p.z.set(v, zb);
  }
  p.alpha = p.x.dot(p.z);
  return p;
}

BitVector uniformize(BitVector z, const Graph& g, const std::string& bases,
                     Rng& rng) {
  size_t n = g.num_vertices();
  check_bases(bases, n);
  if (z.size() != n) throw std::invalid_argument("uniformize: size mismatch");
  BitVector r = BitVector::random(n, rng);
  for (size_t v = 0; v < n; ++v) {
    bool xb = r.get(v);
    bool zb = false;
    for (size_t u : g.neighbors(v)) zb ^= r.get(u);
    conjugate_bit_pair(bases[v], xb, zb);
    if (xb) z.flip(v);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Solver

GssResult solve_instance(const GssInstance& inst, const TreeDecomposition* td,
                         Rng& rng) {
  inst.validate();
  size_t n = inst.graph.num_vertices();

  TreeDecomposition given;
  if (td) {
    given = *td;
  } else {
    TdNode all;
    for (size_t v = 0; v < n; ++v) all.bag.push_back(v);
    given.nodes = {all};
    given.root = 0;
  }
  TreeDecomposition nice = normalize(inst.graph, given);
  GadgetCircuit c = build_circuit(inst.graph, nice);
  BitVector y = sample_subroutine(c, inst.bases, rng);

  BitVector z(n);
  if (inst.postselected.empty()) {
    Graph gp = derive_gprime(c);
    Pauli p = correct_simple(gp, inst.bases, y);
    for (size_t v = 0; v < n; ++v) z.set(v, y.get(v) ^ p.x.get(v));
    z = uniformize(std::move(z), inst.graph, inst.bases, rng);
  } else {
    Pattern pat = build_pattern(inst, c, y);
    auto p = correct_general(c, inst.bases, pat, rng);
    if (!p) return GssResult{"", true};
    for (size_t v = 0; v < n; ++v) z.set(v, y.get(v) ^ p->x.get(v));
    for (size_t i = 0; i < inst.postselected.size(); ++i)
      if (z.get(inst.postselected[i]) != inst.target_outcomes.get(i))
        throw std::logic_error("solve_instance: postselected bit not corrected");
  }

  GssResult res;
  size_t pi = 0;
  for (size_t v = 0; v < n; ++v) {
    if (pi < inst.postselected.size() && inst.postselected[pi] == v) {
      ++pi;
      continue;
    }
    res.outcome.push_back(z.get(v) ? '1' : '0');
  }
  return res;
}

std::string result_to_json(const GssResult& r) {
  json j;
  j["outcome"] = r.outcome;
  j["flag"] = r.zero_probability ? json("zero_probability") : json(nullptr);
  return j.dump();
}

}  // namespace gsim
