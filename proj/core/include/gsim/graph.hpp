// Simple undirected graphs on vertices 0..n-1.
#pragma once

#include "gsim/f2la.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gsim {

class Graph {
 public:
  Graph() = default;
  explicit Graph(size_t n) : adj_(n) {}

  static Graph from_edges(size_t n, const std::vector<std::pair<size_t, size_t>>& edges);
  // {"n": <int>, "edges": [[u, v], ...]}
  static Graph from_json(const std::string& text);
  // One "u v" pair per line; n = 1 + max vertex id. Lines starting with '#'
  // are comments.
  static Graph from_edge_list(const std::string& text);
  // l x l grid, vertex (r, c) -> r * l + c.
  static Graph grid(size_t l);

  std::string to_json() const;

  size_t num_vertices() const { return adj_.size(); }
  size_t num_edges() const;
  const std::vector<size_t>& neighbors(size_t v) const { return adj_[v]; }
  bool has_edge(size_t u, size_t v) const;
  void add_edge(size_t u, size_t v);
  std::vector<std::pair<size_t, size_t>> edges() const;
  BitMatrix adjacency_matrix() const;

  // Induced subgraph; vertex i of the result is verts[i].
  Graph induced(const std::vector<size_t>& verts) const;

  // Connected components as vertex lists.
  std::vector<std::vector<size_t>> components() const;

 private:
  std::vector<std::vector<size_t>> adj_;  // sorted
};

}  // namespace gsim
