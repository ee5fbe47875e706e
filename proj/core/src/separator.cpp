// Lipton-Tarjan planar separator: BFS levels pick two thin level cuts; when
// the middle band is still too heavy it is refined with a fundamental cycle
// of a triangulated, shrunken copy of the band.
#include "gsim/treedecomp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <boost/graph/properties.hpp>
#include <boost/property_map/property_map.hpp>

namespace gsim {

namespace {

using BoostGraph =
    boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                          boost::property<boost::edge_index_t, size_t>>;

BoostGraph to_boost(const Graph& g) {
  BoostGraph bg(g.num_vertices());
  size_t idx = 0;
  for (auto [u, v] : g.edges()) boost::add_edge(u, v, idx++, bg);
  return bg;
}

// Combinatorial embedding: per-vertex rotation of edge ids, plus the position
// of each edge within the rotations of its two endpoints.
struct Embedding {
  std::vector<std::pair<size_t, size_t>> ed;   // edge id -> endpoints
  std::vector<std::vector<size_t>> rot;        // vertex -> edge ids in rotation order
  std::vector<std::array<size_t, 2>> pos;      // edge id -> index in rot[first], rot[second]

  size_t other(size_t e, size_t v) const { return ed[e].first == v ? ed[e].second : ed[e].first; }

  void fill_pos() {
    pos.assign(ed.size(), {SIZE_MAX, SIZE_MAX});
    for (size_t v = 0; v < rot.size(); ++v)
      for (size_t i = 0; i < rot[v].size(); ++i) {
        size_t e = rot[v][i];
        pos[e][ed[e].first == v ? 0 : 1] = i;
      }
  }

  // Face traversal: the half-edge following (e, tail) leaves the head right
  // after the reverse half-edge in the head's rotation.
  std::pair<size_t, size_t> face_next(size_t e, size_t tail) const {
    size_t head = other(e, tail);
    size_t p = pos[e][ed[e].first == head ? 0 : 1];
    size_t e2 = rot[head][(p + 1) % rot[head].size()];
    return {e2, head};
  }
};

bool planar_embedding(const Graph& g, Embedding& out) {
  BoostGraph bg = to_boost(g);
  using Edge = boost::graph_traits<BoostGraph>::edge_descriptor;
  std::vector<std::vector<Edge>> storage(boost::num_vertices(bg));
  auto emb = boost::make_iterator_property_map(storage.begin(), boost::get(boost::vertex_index, bg));
  if (!boost::boyer_myrvold_planarity_test(boost::boyer_myrvold_params::graph = bg,
                                           boost::boyer_myrvold_params::embedding = emb))
    return false;
  out.ed = g.edges();
  out.rot.assign(g.num_vertices(), {});
  auto eidx = boost::get(boost::edge_index, bg);
  for (size_t v = 0; v < storage.size(); ++v)
    for (const Edge& e : storage[v]) out.rot[v].push_back(boost::get(eidx, e));
  out.fill_pos();
  return true;
}

// Walks every face of the embedding and ear-clips the face walks, returning
// the chord edges that extend g to a (planar) triangulation. Chords are only
// used as an edge list downstream, so rotations need no updating.
std::vector<std::pair<size_t, size_t>> triangulation_chords(const Embedding& emb) {
  std::vector<std::pair<size_t, size_t>> chords;
  std::vector<std::array<char, 2>> visited(emb.ed.size(), {0, 0});
  for (size_t e0 = 0; e0 < emb.ed.size(); ++e0)
    for (int side = 0; side < 2; ++side) {
      if (visited[e0][side]) continue;
      size_t tail0 = side == 0 ? emb.ed[e0].first : emb.ed[e0].second;
      std::vector<size_t> walk;  // tail vertices along the face
      size_t e = e0, tail = tail0;
      do {
        visited[e][emb.ed[e].first == tail ? 0 : 1] = 1;
        walk.push_back(tail);
        auto [e2, t2] = emb.face_next(e, tail);
        e = e2;
        tail = t2;
      } while (!(e == e0 && tail == tail0));
      while (walk.size() > 3) {
        size_t l = walk.size();
        size_t ear = SIZE_MAX;
        for (size_t i = 0; i < l; ++i)
          if (walk[i] != walk[(i + 2) % l]) {
            ear = i;
            break;
          }
        if (ear == SIZE_MAX) break;  // degenerate alternating walk
        chords.emplace_back(walk[ear], walk[(ear + 2) % l]);
        walk.erase(walk.begin() + static_cast<long>((ear + 1) % l));
      }
    }
  return chords;
}

struct BfsTree {
  std::vector<size_t> parent, depth, order;  // parent[root] = SIZE_MAX
};

BfsTree bfs_tree(const std::vector<std::vector<size_t>>& adj, size_t root) {
  BfsTree t;
  size_t n = adj.size();
  t.parent.assign(n, SIZE_MAX);
  t.depth.assign(n, SIZE_MAX);
  t.depth[root] = 0;
  t.order.push_back(root);
  for (size_t i = 0; i < t.order.size(); ++i) {
    size_t u = t.order[i];
    for (size_t v : adj[u])
      if (t.depth[v] == SIZE_MAX) {
        t.depth[v] = t.depth[u] + 1;
        t.parent[v] = u;
        t.order.push_back(v);
      }
  }
  return t;
}

// Vertex set of the fundamental cycle of non-tree edge (u, v).
std::vector<size_t> fundamental_cycle(const BfsTree& t, size_t u, size_t v) {
  std::vector<size_t> cu{u}, cv{v};
  size_t a = u, b = v;
  while (a != b) {
    if (t.depth[a] >= t.depth[b]) {
      a = t.parent[a];
      cu.push_back(a);
    } else {
      b = t.parent[b];
      cv.push_back(b);
    }
  }
  cu.insert(cu.end(), cv.begin(), cv.end() - 1);  // LCA once
  std::sort(cu.begin(), cu.end());
  cu.erase(std::unique(cu.begin(), cu.end()), cu.end());
  return cu;
}

// Max total weight of a connected component of (adj minus the blocked set).
size_t heaviest_component(const std::vector<std::vector<size_t>>& adj, const std::vector<size_t>& weight,
                          const std::vector<char>& blocked) {
  size_t n = adj.size(), best = 0;
  std::vector<char> seen(n, 0);
  std::vector<size_t> stack;
  for (size_t s = 0; s < n; ++s) {
    if (seen[s] || blocked[s]) continue;
    size_t w = 0;
    seen[s] = 1;
    stack.assign(1, s);
    while (!stack.empty()) {
      size_t x = stack.back();
      stack.pop_back();
      w += weight[x];
      for (size_t y : adj[x])
        if (!seen[y] && !blocked[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    best = std::max(best, w);
  }
  return best;
}

// Separator of a connected planar graph; returns the separator vertex set.
std::vector<size_t> lt_separator_connected(const Graph& g) {
  size_t n = g.num_vertices();
  BfsTree levels = bfs_tree([&] {
    std::vector<std::vector<size_t>> adj(n);
    for (size_t v = 0; v < n; ++v) adj[v] = g.neighbors(v);
    return adj;
  }(), 0);
  size_t maxl = 0;
  for (size_t v = 0; v < n; ++v) maxl = std::max(maxl, levels.depth[v]);
  std::vector<std::vector<size_t>> level(maxl + 1);
  for (size_t v = 0; v < n; ++v) level[levels.depth[v]].push_back(v);

  // t1: level of the median vertex; k: vertices on levels <= t1.
  size_t t1 = 0, k = 0;
  for (size_t prefix = 0; t1 <= maxl; ++t1) {
    prefix += level[t1].size();
    if (2 * prefix >= n) {
      k = prefix;
      break;
    }
  }
  auto pick_cut = [&](size_t lo, size_t hi, double bound, auto cost) {
    // First level in [lo, hi] (scanning from hi for t0, lo for t2 handled by
    // the caller ordering) meeting |L| + cost <= bound; argmin fallback.
    size_t best = lo;
    double best_val = 1e300;
    for (size_t l = lo; l <= hi; ++l) {
      size_t sz = l <= maxl ? level[l].size() : 0;
      double val = static_cast<double>(sz) + cost(l);
      if (val <= bound) return l;
      if (val < best_val) {
        best_val = val;
        best = l;
      }
    }
    return best;
  };
  size_t t0 = t1;
  {
    double bound = 2.0 * std::sqrt(static_cast<double>(k));
    size_t best = t1;
    double best_val = 1e300;
    for (size_t l = t1 + 1; l-- > 0;) {
      double val = static_cast<double>(level[l].size()) + 2.0 * static_cast<double>(t1 - l);
      if (val <= bound) {
        best = l;
        best_val = val;
        break;
      }
      if (val < best_val) {
        best_val = val;
        best = l;
      }
    }
    t0 = best;
  }
  size_t t2 = pick_cut(t1 + 1, maxl + 1, 2.0 * std::sqrt(static_cast<double>(n - k)),
                       [&](size_t l) { return 2.0 * static_cast<double>(l - t1 - 1); });

  std::vector<size_t> sep;
  if (t0 <= maxl) sep.insert(sep.end(), level[t0].begin(), level[t0].end());
  if (t2 <= maxl) sep.insert(sep.end(), level[t2].begin(), level[t2].end());
  std::vector<size_t> band;
  for (size_t l = t0 + 1; l < t2 && l <= maxl; ++l) band.insert(band.end(), level[l].begin(), level[l].end());
  if (3 * band.size() <= 2 * n) {
    std::sort(sep.begin(), sep.end());
    return sep;
  }

  // Refinement: shrink levels <= t0 to a single weight-0 root x, drop levels
  // >= t2, triangulate, and find a weight-balanced fundamental cycle.
  std::sort(band.begin(), band.end());
  std::vector<size_t> local(n, SIZE_MAX);  // g vertex -> shrunken vertex
  for (size_t i = 0; i < band.size(); ++i) local[band[i]] = i + 1;
  Graph h(band.size() + 1);  // vertex 0 = x
  for (size_t v : band)
    for (size_t w : g.neighbors(v)) {
      if (local[w] != SIZE_MAX) {
        if (v < w) h.add_edge(local[v], local[w]);
      } else if (levels.depth[w] <= t0) {
        h.add_edge(0, local[v]);
      }
    }
  Embedding emb;
  if (!planar_embedding(h, emb)) throw std::logic_error("planar_separator: shrunken band graph not planar");
  std::vector<std::vector<size_t>> hadj(h.num_vertices());
  std::set<std::pair<size_t, size_t>> seen_edges;
  auto add_h_edge = [&](size_t u, size_t v) {
    if (u == v) return;
    auto key = std::minmax(u, v);
    if (!seen_edges.insert({key.first, key.second}).second) return;
    hadj[u].push_back(v);
    hadj[v].push_back(u);
  };
  for (auto [u, v] : h.edges()) add_h_edge(u, v);
  for (auto [u, v] : triangulation_chords(emb)) add_h_edge(u, v);

  BfsTree tree = bfs_tree(hadj, 0);
  std::vector<size_t> weight(h.num_vertices(), 1);
  weight[0] = 0;
  size_t total = band.size();
  std::vector<char> blocked(h.num_vertices(), 0);
  for (auto [u, v] : seen_edges) {
    if (tree.parent[u] == v || tree.parent[v] == u) continue;  // tree edge
    auto cycle = fundamental_cycle(tree, u, v);
    for (size_t c : cycle) blocked[c] = 1;
    size_t heaviest = heaviest_component(hadj, weight, blocked);
    for (size_t c : cycle) blocked[c] = 0;
    if (3 * heaviest <= 2 * total) {
      for (size_t c : cycle)
        if (c != 0) sep.push_back(band[c - 1]);
      std::sort(sep.begin(), sep.end());
      sep.erase(std::unique(sep.begin(), sep.end()), sep.end());
      return sep;
    }
  }
  throw std::logic_error("planar_separator: no balanced fundamental cycle found");
}

// Greedy packing of mutually non-adjacent pieces into two sides, each at most
// 2n/3 when every piece is.
Separation pack_pieces(const Graph& g, std::vector<size_t> sep) {
  size_t n = g.num_vertices();
  std::vector<char> in_sep(n, 0);
  for (size_t v : sep) in_sep[v] = 1;
  std::vector<size_t> keep;
  for (size_t v = 0; v < n; ++v)
    if (!in_sep[v]) keep.push_back(v);
  Graph rest = g.induced(keep);
  auto comps = rest.components();
  std::vector<std::vector<size_t>> pieces;
  for (const auto& comp : comps) {
    std::vector<size_t> piece;
    for (size_t i : comp) piece.push_back(keep[i]);
    pieces.push_back(std::move(piece));
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });
  Separation out;
  out.s = std::move(sep);
  if (!pieces.empty() && 3 * pieces[0].size() >= n) {
    out.a = pieces[0];
    for (size_t i = 1; i < pieces.size(); ++i) out.b.insert(out.b.end(), pieces[i].begin(), pieces[i].end());
  } else {
    for (const auto& piece : pieces) {
      auto& side = 3 * out.a.size() < n ? out.a : out.b;
      side.insert(side.end(), piece.begin(), piece.end());
    }
  }
  std::sort(out.a.begin(), out.a.end());
  std::sort(out.b.begin(), out.b.end());
  if (3 * out.a.size() > 2 * n || 3 * out.b.size() > 2 * n)
    throw std::logic_error("planar_separator: unbalanced sides");
  double beta_bound = 2.0 * std::sqrt(2.0) * std::sqrt(static_cast<double>(n));
  if (static_cast<double>(out.s.size()) > beta_bound)
    throw std::logic_error("planar_separator: separator too large");
  return out;
}

bool is_square_grid(const Graph& g, size_t& l_out) {
  size_t n = g.num_vertices();
  auto l = static_cast<size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  if (l < 2 || l * l != n) return false;
  if (g.num_edges() != 2 * l * (l - 1)) return false;
  for (size_t r = 0; r < l; ++r)
    for (size_t c = 0; c < l; ++c) {
      std::vector<size_t> expect;
      if (r > 0) expect.push_back((r - 1) * l + c);
      if (c > 0) expect.push_back(r * l + c - 1);
      if (c + 1 < l) expect.push_back(r * l + c + 1);
      if (r + 1 < l) expect.push_back((r + 1) * l + c);
      std::sort(expect.begin(), expect.end());
      if (g.neighbors(r * l + c) != expect) return false;
    }
  l_out = l;
  return true;
}

}  // namespace

bool is_planar(const Graph& g) {
  if (g.num_vertices() < 5) return true;
  BoostGraph bg = to_boost(g);
  return boost::boyer_myrvold_planarity_test(bg);
}

Separation planar_separator(const Graph& g) {
  size_t n = g.num_vertices();
  if (!is_planar(g)) throw std::invalid_argument("planar_separator: graph is not planar");
  if (n == 0) return {};
  if (size_t l = 0; is_square_grid(g, l)) {
    std::vector<size_t> sep;
    size_t mid = l / 2;
    for (size_t r = 0; r < l; ++r) sep.push_back(r * l + mid);
    return pack_pieces(g, std::move(sep));
  }
  auto comps = g.components();
  std::vector<size_t> sep;
  size_t largest = 0;
  for (size_t i = 1; i < comps.size(); ++i)
    if (comps[i].size() > comps[largest].size()) largest = i;
  if (3 * comps[largest].size() > 2 * n) {
    const auto& comp = comps[largest];
    std::vector<size_t> local_sep = lt_separator_connected(g.induced(comp));
    for (size_t i : local_sep) sep.push_back(comp[i]);
  }
  return pack_pieces(g, std::move(sep));
}

}  // namespace gsim
