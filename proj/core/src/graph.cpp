#include "gsim/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gsim {

void Graph::add_edge(size_t u, size_t v) {
  if (u >= adj_.size() || v >= adj_.size()) throw std::invalid_argument("add_edge: vertex out of range");
  if (u == v) throw std::invalid_argument("add_edge: self loops not supported");
  if (has_edge(u, v)) return;
  adj_[u].insert(std::lower_bound(adj_[u].begin(), adj_[u].end(), v), v);
  adj_[v].insert(std::lower_bound(adj_[v].begin(), adj_[v].end(), u), u);
}

bool Graph::has_edge(size_t u, size_t v) const {
  const auto& a = adj_[u];
  return std::binary_search(a.begin(), a.end(), v);
}

size_t Graph::num_edges() const {
  size_t twice = 0;
  for (const auto& a : adj_) twice += a.size();
  return twice / 2;
}

Graph Graph::from_edges(size_t n, const std::vector<std::pair<size_t, size_t>>& edges) {
  Graph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

Graph Graph::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Graph g(j.at("n").get<size_t>());
  for (const auto& e : j.at("edges")) {
    if (e.size() != 2) throw std::invalid_argument("from_json: edge must have two endpoints");
    g.add_edge(e[0].get<size_t>(), e[1].get<size_t>());
  }
  return g;
}

Graph Graph::from_edge_list(const std::string& text) {
  std::vector<std::pair<size_t, size_t>> edges;
  size_t n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    size_t u, v;
    if (!(ls >> u >> v)) throw std::invalid_argument("from_edge_list: malformed line: " + line);
    edges.emplace_back(u, v);
    n = std::max({n, u + 1, v + 1});
  }
  return from_edges(n, edges);
}

Graph Graph::grid(size_t l) {
  Graph g(l * l);
  for (size_t r = 0; r < l; ++r)
    for (size_t c = 0; c < l; ++c) {
      if (c + 1 < l) g.add_edge(r * l + c, r * l + c + 1);
      if (r + 1 < l) g.add_edge(r * l + c, (r + 1) * l + c);
    }
  return g;
}

std::string Graph::to_json() const {
  nlohmann::json j;
  j["n"] = num_vertices();
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : edges()) j["edges"].push_back({u, v});
  return j.dump();
}

std::vector<std::pair<size_t, size_t>> Graph::edges() const {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t u = 0; u < adj_.size(); ++u)
    for (size_t v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

BitMatrix Graph::adjacency_matrix() const {
  BitMatrix m(num_vertices(), num_vertices());
  for (size_t u = 0; u < adj_.size(); ++u)
    for (size_t v : adj_[u]) m.set(u, v, true);
  return m;
}

Graph Graph::induced(const std::vector<size_t>& verts) const {
  std::vector<size_t> index(num_vertices(), SIZE_MAX);
  for (size_t i = 0; i < verts.size(); ++i) {
    if (verts[i] >= num_vertices() || index[verts[i]] != SIZE_MAX)
      throw std::invalid_argument("induced: invalid vertex list");
    index[verts[i]] = i;
  }
  Graph g(verts.size());
  for (size_t i = 0; i < verts.size(); ++i)
    for (size_t v : adj_[verts[i]])
      if (index[v] != SIZE_MAX && index[v] > i) g.add_edge(i, index[v]);
  return g;
}

std::vector<std::vector<size_t>> Graph::components() const {
  std::vector<std::vector<size_t>> comps;
  std::vector<char> seen(num_vertices(), 0);
  for (size_t s = 0; s < num_vertices(); ++s) {
    if (seen[s]) continue;
    std::vector<size_t> comp{s}, stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      size_t u = stack.back();
      stack.pop_back();
      for (size_t v : adj_[u])
        if (!seen[v]) {
          seen[v] = 1;
          comp.push_back(v);
          stack.push_back(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace gsim
