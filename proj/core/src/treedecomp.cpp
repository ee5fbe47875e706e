#include "gsim/treedecomp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace gsim {

namespace {

std::vector<size_t> sorted_union(const std::vector<size_t>& a, const std::vector<size_t>& b) {
  std::vector<size_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<size_t> sorted_intersection(const std::vector<size_t>& a, const std::vector<size_t>& b) {
  std::vector<size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const std::vector<size_t>& a, const std::vector<size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void check_bags_sorted(const TreeDecomposition& t) {
  for (const auto& node : t.nodes) {
    if (!std::is_sorted(node.bag.begin(), node.bag.end()) ||
        std::adjacent_find(node.bag.begin(), node.bag.end()) != node.bag.end())
      throw std::invalid_argument("tree decomposition bags must be sorted and duplicate-free");
  }
}

}  // namespace

size_t TreeDecomposition::max_bag() const {
  size_t m = 0;
  for (const auto& node : nodes) m = std::max(m, node.bag.size());
  return m;
}

long TreeDecomposition::width() const { return static_cast<long>(max_bag()) - 1; }

TreeDecomposition TreeDecomposition::from_td_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  size_t num_bags = 0;
  bool have_header = false;
  TreeDecomposition t;
  std::vector<std::pair<size_t, size_t>> tree_edges;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (line[0] == 's') {
      std::string s, td;
      size_t w, n;
      if (!(ls >> s >> td >> num_bags >> w >> n) || td != "td")
        throw std::invalid_argument("bad .td header: " + line);
      t.nodes.resize(num_bags);
      have_header = true;
    } else if (line[0] == 'b') {
      char b;
      size_t id;
      ls >> b >> id;
      if (!have_header || id == 0 || id > num_bags) throw std::invalid_argument("bad bag line: " + line);
      size_t v;
      while (ls >> v) t.nodes[id - 1].bag.push_back(v - 1);
      std::sort(t.nodes[id - 1].bag.begin(), t.nodes[id - 1].bag.end());
    } else {
      size_t a, b;
      if (!(ls >> a >> b)) throw std::invalid_argument("bad edge line: " + line);
      if (a == 0 || b == 0 || a > num_bags || b > num_bags) throw std::invalid_argument("bad edge line: " + line);
      tree_edges.emplace_back(a - 1, b - 1);
    }
  }
  if (!have_header) throw std::invalid_argument(".td text missing header");
  if (tree_edges.size() + 1 != std::max<size_t>(num_bags, 1))
    throw std::invalid_argument(".td edge count does not form a tree");
  // Root at bag 1 and orient edges away from it.
  std::vector<std::vector<size_t>> adj(num_bags);
  for (auto [a, b] : tree_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(num_bags, 0);
  std::vector<size_t> stack{0};
  seen[0] = 1;
  size_t visited = num_bags ? 1 : 0;
  while (!stack.empty()) {
    size_t u = stack.back();
    stack.pop_back();
    for (size_t v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        t.nodes[u].children.push_back(v);
        stack.push_back(v);
      }
  }
  if (visited != num_bags) throw std::invalid_argument(".td edges do not form a tree");
  t.root = 0;
  return t;
}

std::string TreeDecomposition::to_td_text(size_t n) const {
  std::ostringstream out;
  out << "s td " << nodes.size() << ' ' << max_bag() << ' ' << n << '\n';
  for (size_t i = 0; i < nodes.size(); ++i) {
    out << "b " << i + 1;
    for (size_t v : nodes[i].bag) out << ' ' << v + 1;
    out << '\n';
  }
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t c : nodes[i].children) out << i + 1 << ' ' << c + 1 << '\n';
  return out.str();
}

TdDiagnostics validate_td(const Graph& g, const TreeDecomposition& t) {
  TdDiagnostics d;
  check_bags_sorted(t);
  size_t n = g.num_vertices();
  std::vector<size_t> node_count(n, 0), edge_count(n, 0);
  for (const auto& node : t.nodes)
    for (size_t v : node.bag) {
      if (v >= n) throw std::invalid_argument("bag vertex out of range");
      ++node_count[v];
    }
  for (size_t i = 0; i < t.nodes.size(); ++i)
    for (size_t c : t.nodes[i].children)
      for (size_t v : sorted_intersection(t.nodes[i].bag, t.nodes[c].bag)) ++edge_count[v];
  for (size_t v = 0; v < n; ++v) {
    if (node_count[v] == 0) {
      d.vertices_covered = false;
      d.messages.push_back("vertex " + std::to_string(v) + " not in any bag");
    } else if (node_count[v] != edge_count[v] + 1) {
      // The bags containing v induce a forest; it is a subtree exactly when
      // #nodes = #edges + 1.
      d.subtrees_connected = false;
      d.messages.push_back("bags containing vertex " + std::to_string(v) + " are disconnected");
    }
  }
  for (auto [u, v] : g.edges()) {
    bool covered = false;
    for (const auto& node : t.nodes) {
      if (std::binary_search(node.bag.begin(), node.bag.end(), u) &&
          std::binary_search(node.bag.begin(), node.bag.end(), v)) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      d.edges_covered = false;
      d.messages.push_back("edge {" + std::to_string(u) + "," + std::to_string(v) + "} not in any bag");
    }
  }
  for (size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& node = t.nodes[i];
    if (node.kind == TdKind::None) continue;
    bool ok = false;
    switch (node.kind) {
      case TdKind::Introduce:
        ok = node.children.size() <= 1 &&
             (node.children.empty() || is_subset(t.nodes[node.children[0]].bag, node.bag));
        break;
      case TdKind::Forget:
        ok = node.children.size() == 1 && is_subset(node.bag, t.nodes[node.children[0]].bag);
        break;
      case TdKind::Merge:
        ok = node.children.size() == 2 &&
             node.bag == sorted_union(t.nodes[node.children[0]].bag, t.nodes[node.children[1]].bag);
        break;
      default:
        break;
    }
    if (!ok) {
      d.kinds_ok = false;
      d.messages.push_back("node " + std::to_string(i) + " kind label inconsistent with children");
    }
  }
  return d;
}

double norm_p(const TreeDecomposition& t, double p) {
  if (std::isinf(p)) return static_cast<double>(t.max_bag());
  if (p < 1) throw std::invalid_argument("norm_p: p must be >= 1");
  double sum = 0;
  for (const auto& node : t.nodes) sum += std::pow(static_cast<double>(node.bag.size()), p);
  return std::pow(sum, 1.0 / p);
}

namespace {

// Rebuilds the node array reachable from t.root (drops orphans, normalizes
// ids to DFS order).
TreeDecomposition compact(const TreeDecomposition& t) {
  TreeDecomposition out;
  std::function<size_t(size_t)> copy_sub = [&](size_t id) {
    size_t nid = out.nodes.size();
    out.nodes.push_back({t.nodes[id].bag, {}, t.nodes[id].kind});
    for (size_t c : t.nodes[id].children) {
      size_t cc = copy_sub(c);
      out.nodes[nid].children.push_back(cc);
    }
    return nid;
  };
  out.root = copy_sub(t.root);
  return out;
}

}  // namespace

TreeDecomposition contract_redundant(const TreeDecomposition& t) {
  check_bags_sorted(t);
  TreeDecomposition work = t;
  std::function<void(size_t)> process = [&](size_t id) {
    auto& ch = work.nodes[id].children;
    for (size_t i = 0; i < ch.size();) {
      if (is_subset(work.nodes[ch[i]].bag, work.nodes[id].bag)) {
        // Contract: adopt the child's children in its place.
        auto grandchildren = work.nodes[ch[i]].children;
        ch.erase(ch.begin() + static_cast<long>(i));
        ch.insert(ch.begin() + static_cast<long>(i), grandchildren.begin(), grandchildren.end());
      } else {
        ++i;
      }
    }
    for (size_t c : ch) process(c);
  };
  process(work.root);
  TreeDecomposition out = compact(work);
  for (auto& node : out.nodes) node.kind = TdKind::None;
  return out;
}

TreeDecomposition to_nice_form(const TreeDecomposition& t) {
  check_bags_sorted(t);
  TreeDecomposition out;
  auto add_node = [&](std::vector<size_t> bag, std::vector<size_t> children) {
    out.nodes.push_back({std::move(bag), std::move(children), TdKind::None});
    return out.nodes.size() - 1;
  };
  std::function<size_t(size_t)> build = [&](size_t id) -> size_t {
    const auto& bag = t.nodes[id].bag;
    const auto& ch = t.nodes[id].children;
    if (ch.empty()) return add_node(bag, {});
    std::vector<size_t> parts;  // roots of per-child subtrees, bags = bag ∩ child bag
    for (size_t c : ch) {
      size_t sub = build(c);
      auto inter = sorted_intersection(bag, out.nodes[sub].bag);
      if (inter != out.nodes[sub].bag) sub = add_node(inter, {sub});  // forget above the child
      parts.push_back(sub);
    }
    // Binary merge tree over the parts; every internal bag is the union of
    // its two children.
    while (parts.size() > 1) {
      size_t a = parts.back();
      parts.pop_back();
      size_t b = parts.back();
      parts.pop_back();
      parts.push_back(add_node(sorted_union(out.nodes[a].bag, out.nodes[b].bag), {a, b}));
    }
    size_t top = parts[0];
    if (out.nodes[top].bag == bag) return top;
    return add_node(bag, {top});  // introduce bag \ (bag ∩ union of children)
  };
  out.root = build(t.root);
  if (!out.nodes[out.root].bag.empty()) out.root = add_node({}, {out.root});
  label_kinds(out);
  return out;
}

TreeDecomposition compress(const TreeDecomposition& t, size_t width_t) {
  check_bags_sorted(t);
  TreeDecomposition work = t;
  std::function<void(size_t)> process = [&](size_t id) {
    auto original_children = work.nodes[id].children;
    for (size_t c : original_children) process(c);
    std::vector<size_t> new_children;
    for (size_t c : original_children) {
      if (work.nodes[c].bag.size() <= 2 * width_t) {
        work.nodes[id].bag = sorted_union(work.nodes[id].bag, work.nodes[c].bag);
        // Adopted grandchildren are not further contraction candidates.
        for (size_t gc : work.nodes[c].children) new_children.push_back(gc);
      } else {
        new_children.push_back(c);
      }
    }
    work.nodes[id].children = std::move(new_children);
  };
  process(work.root);
  TreeDecomposition out = compact(work);
  for (auto& node : out.nodes) node.kind = TdKind::None;
  return out;
}

TreeDecomposition normalize(const Graph& g, const TreeDecomposition& t) {
  TdDiagnostics d = validate_td(g, t);
  if (!d.vertices_covered || !d.edges_covered || !d.subtrees_connected) {
    std::string msg = "normalize: invalid tree decomposition";
    for (const auto& m : d.messages) msg += "; " + m;
    throw std::invalid_argument(msg);
  }
  TreeDecomposition nice = to_nice_form(contract_redundant(t));
  TreeDecomposition small = compress(nice, nice.max_bag() == 0 ? 0 : nice.max_bag() - 1);
  return to_nice_form(small);
}

TreeDecomposition preimage(const TreeDecomposition& t, const CoarseGraining& f) {
  check_bags_sorted(t);
  size_t n_coarse = 0;
  for (size_t w : f.map) n_coarse = std::max(n_coarse, w + 1);
  std::vector<size_t> class_size(n_coarse, 0);
  for (size_t w : f.map) ++class_size[w];
  for (size_t w = 0; w < n_coarse; ++w)
    if (class_size[w] > f.r) throw std::invalid_argument("preimage: class exceeds coarse-graining bound r");
  TreeDecomposition out = t;
  for (auto& node : out.nodes) {
    std::vector<size_t> bag;
    for (size_t v = 0; v < f.map.size(); ++v)
      if (std::binary_search(node.bag.begin(), node.bag.end(), f.map[v])) bag.push_back(v);
    node.bag = std::move(bag);
    node.kind = TdKind::None;
  }
  return out;
}

bool validate_coarse_graining(const Graph& fine, const Graph& coarse, const CoarseGraining& f) {
  if (f.map.size() != fine.num_vertices()) return false;
  std::vector<size_t> class_size(coarse.num_vertices(), 0);
  for (size_t w : f.map) {
    if (w >= coarse.num_vertices()) return false;
    ++class_size[w];
  }
  for (size_t s : class_size)
    if (s > f.r) return false;
  for (auto [u, v] : fine.edges())
    if (f.map[u] != f.map[v] && !coarse.has_edge(f.map[u], f.map[v])) return false;
  return true;
}

void label_kinds(TreeDecomposition& t) {
  check_bags_sorted(t);
  for (size_t i = 0; i < t.nodes.size(); ++i) {
    auto& node = t.nodes[i];
    if (node.children.empty()) {
      node.kind = TdKind::Introduce;
    } else if (node.children.size() == 1) {
      const auto& cb = t.nodes[node.children[0]].bag;
      if (is_subset(cb, node.bag))
        node.kind = TdKind::Introduce;
      else if (is_subset(node.bag, cb))
        node.kind = TdKind::Forget;
      else
        throw std::invalid_argument("label_kinds: node " + std::to_string(i) +
                                    " bag incomparable with its child");
    } else if (node.children.size() == 2) {
      if (node.bag != sorted_union(t.nodes[node.children[0]].bag, t.nodes[node.children[1]].bag))
        throw std::invalid_argument("label_kinds: node " + std::to_string(i) +
                                    " is not the union of its two children");
      node.kind = TdKind::Merge;
    } else {
      throw std::invalid_argument("label_kinds: node " + std::to_string(i) + " has more than two children");
    }
  }
}

TreeDecomposition compute_td(const Graph& g, const std::vector<size_t>& u) {
  if (!std::is_sorted(u.begin(), u.end()) || std::adjacent_find(u.begin(), u.end()) != u.end())
    throw std::invalid_argument("compute_td: u must be sorted and duplicate-free");
  for (size_t v : u)
    if (v >= g.num_vertices()) throw std::invalid_argument("compute_td: u out of range");
  if (!is_planar(g)) throw std::invalid_argument("compute_td: graph is not planar");
  constexpr size_t kBase = 72;  // ceil(beta^2 / (1 - alpha)^2)

  TreeDecomposition out;
  auto add_node = [&](std::vector<size_t> bag, std::vector<size_t> children) {
    out.nodes.push_back({std::move(bag), std::move(children), TdKind::None});
    return out.nodes.size() - 1;
  };

  // verts: sorted original-vertex ids of the current subgraph; uu ⊆ verts.
  std::function<size_t(const std::vector<size_t>&, const std::vector<size_t>&)> rec =
      [&](const std::vector<size_t>& verts, const std::vector<size_t>& uu) -> size_t {
    if (verts.empty()) return add_node(uu, {});
    Graph sub = g.induced(verts);
    auto comps = sub.components();
    if (comps.size() > 1) {
      std::vector<size_t> parts;
      for (const auto& comp : comps) {
        std::vector<size_t> cverts;
        for (size_t i : comp) cverts.push_back(verts[i]);
        std::sort(cverts.begin(), cverts.end());
        parts.push_back(rec(cverts, sorted_intersection(uu, cverts)));
      }
      while (parts.size() > 1) {
        size_t a = parts.back();
        parts.pop_back();
        size_t b = parts.back();
        parts.pop_back();
        parts.push_back(add_node(sorted_union(out.nodes[a].bag, out.nodes[b].bag), {a, b}));
      }
      return parts[0];  // bag = union of uu ∩ comp = uu
    }
    if (verts.size() <= kBase) {
      size_t leaf = add_node(verts, {});
      if (uu == verts) return leaf;
      return add_node(uu, {leaf});
    }
    Separation sep = planar_separator(sub);
    auto lift = [&](const std::vector<size_t>& local) {
      std::vector<size_t> v;
      for (size_t i : local) v.push_back(verts[i]);
      std::sort(v.begin(), v.end());
      return v;
    };
    std::vector<size_t> a = lift(sep.a), s = lift(sep.s), b = lift(sep.b);
    size_t ra = rec(sorted_union(a, s), sorted_union(s, sorted_intersection(a, uu)));
    size_t rb = rec(sorted_union(b, s), sorted_union(s, sorted_intersection(b, uu)));
    size_t merge = add_node(sorted_union(out.nodes[ra].bag, out.nodes[rb].bag), {ra, rb});
    if (out.nodes[merge].bag == uu) return merge;
    return add_node(uu, {merge});
  };

  std::vector<size_t> all(g.num_vertices());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  out.root = rec(all, u);
  label_kinds(out);
  return out;
}

}  // namespace gsim
