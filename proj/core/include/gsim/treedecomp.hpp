// Tree decompositions: validation, nice-form normalization, planar
// separators, and separator-based construction.
#pragma once

#include "gsim/graph.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gsim {

enum class TdKind { None, Introduce, Forget, Merge };

struct TdNode {
  std::vector<size_t> bag;  // sorted, unique
  std::vector<size_t> children;
  TdKind kind = TdKind::None;
};

struct TreeDecomposition {
  std::vector<TdNode> nodes;
  size_t root = 0;

  // Max bag size minus one (-1 when every bag is empty).
  long width() const;
  size_t max_bag() const;

  // PACE-2017-style text: "s td <#bags> <width+1> <n>" header, "b <id> <v...>"
  // bag lines, then tree edges "<id1> <id2>" (all ids/vertices 1-based).
  static TreeDecomposition from_td_text(const std::string& text);
  std::string to_td_text(size_t n) const;
};

struct TdDiagnostics {
  bool vertices_covered = true;
  bool edges_covered = true;
  bool subtrees_connected = true;
  bool kinds_ok = true;  // only checked where kind != None
  std::vector<std::string> messages;
  bool ok() const { return vertices_covered && edges_covered && subtrees_connected && kinds_ok; }
};

// A partition V = a ∪ s ∪ b with no edges between a and b.
struct Separation {
  std::vector<size_t> a, s, b;
};

// An r-coarse-graining f: V(fine) -> V(coarse): every fine edge {u,v} has
// f(u)=f(v) or {f(u),f(v)} an edge of the coarse graph, and every preimage
// has size <= r.
struct CoarseGraining {
  std::vector<size_t> map;  // indexed by fine vertex
  size_t r = 0;
};

TdDiagnostics validate_td(const Graph& g, const TreeDecomposition& t);

// (sum of |bag|^p)^(1/p); p = infinity gives the max bag size.
double norm_p(const TreeDecomposition& t, double p);

// Contracts every tree edge whose parent bag contains the child bag.
TreeDecomposition contract_redundant(const TreeDecomposition& t);

// Produces a nice decomposition (every node introduce/forget/merge, kinds
// filled in) with an empty root bag. Width unchanged.
TreeDecomposition to_nice_form(const TreeDecomposition& t);

// For a nice decomposition of width width_t, contracts small children
// (bag <= 2*width_t) into their parents bottom-up; output bags <= 5*width_t
// but the result is generally no longer nice.
TreeDecomposition compress(const TreeDecomposition& t, size_t width_t);

// contract_redundant -> to_nice_form -> compress -> to_nice_form.
TreeDecomposition normalize(const Graph& g, const TreeDecomposition& t);

// Replaces every bag by its preimage under f. Throws if f violates the
// coarse-graining size bound; edge condition is the caller's responsibility
// (see validate_coarse_graining).
TreeDecomposition preimage(const TreeDecomposition& t, const CoarseGraining& f);

bool validate_coarse_graining(const Graph& fine, const Graph& coarse, const CoarseGraining& f);

// Lipton-Tarjan planar separator, alpha = 2/3, beta = 2*sqrt(2).
// Throws std::invalid_argument on non-planar input.
Separation planar_separator(const Graph& g);

bool is_planar(const Graph& g);

// Recursive separator-based construction: valid nice tree decomposition with
// root bag u and width O(|u| + sqrt(n)).
TreeDecomposition compute_td(const Graph& g, const std::vector<size_t>& u);

// Recomputes node kinds; throws std::invalid_argument if the decomposition is
// not nice.
void label_kinds(TreeDecomposition& t);

}  // namespace gsim
