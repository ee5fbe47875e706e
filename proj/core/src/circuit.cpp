#include "gsim/circuit.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "gsim/planar.hpp"
#include "gsim/statevector.hpp"
#include "gsim/tableau.hpp"

namespace gsim {

namespace {

struct Primitive {
  Gate g;
  size_t a = 0, b = 0;  // b unused for one-qubit gates
};

// Expands a gate into the {H, S, CZ} generating set (phases are immaterial).
void expand_gate(const CircuitGate& gate, std::vector<Primitive>& out) {
  size_t a = gate.q[0];
  size_t b = gate.q.size() > 1 ? gate.q[1] : 0;
  if (gate.g == "H") {
    out.push_back({Gate::H, a});
  } else if (gate.g == "S") {
    out.push_back({Gate::S, a});
  } else if (gate.g == "Sdg") {
    for (int i = 0; i < 3; ++i) out.push_back({Gate::S, a});
  } else if (gate.g == "Z") {
    out.push_back({Gate::S, a});
    out.push_back({Gate::S, a});
  } else if (gate.g == "X") {
    out.push_back({Gate::H, a});
    out.push_back({Gate::S, a});
    out.push_back({Gate::S, a});
    out.push_back({Gate::H, a});
  } else if (gate.g == "Y") {
    out.push_back({Gate::S, a});
    out.push_back({Gate::S, a});
    out.push_back({Gate::H, a});
    out.push_back({Gate::S, a});
    out.push_back({Gate::S, a});
    out.push_back({Gate::H, a});
  } else if (gate.g == "CZ") {
    out.push_back({Gate::CZ, a, b});
  } else if (gate.g == "CNOT") {
    out.push_back({Gate::H, b});
    out.push_back({Gate::CZ, a, b});
    out.push_back({Gate::H, b});
  } else {
    throw std::invalid_argument("CliffordCircuit: unknown gate " + gate.g);
  }
}

std::vector<Primitive> expand(const std::vector<CircuitGate>& gates) {
  std::vector<Primitive> out;
  for (const CircuitGate& gate : gates) expand_gate(gate, out);
  return out;
}

size_t primitive_depth(const std::vector<Primitive>& prims, size_t n) {
  std::vector<size_t> level(n, 0);
  size_t d = 0;
  for (const Primitive& p : prims) {
    size_t l = level[p.a] + 1;
    if (gate_arity(p.g) == 2) l = std::max(l, level[p.b] + 1);
    level[p.a] = l;
    if (gate_arity(p.g) == 2) level[p.b] = l;
    d = std::max(d, l);
  }
  return d;
}

size_t gate_qubits(const std::string& name) {
  if (name == "CZ" || name == "CNOT") return 2;
  if (name == "H" || name == "S" || name == "Sdg" || name == "X" ||
      name == "Y" || name == "Z")
    return 1;
  throw std::invalid_argument("CliffordCircuit: unknown gate " + name);
}

}  // namespace

CliffordCircuit CliffordCircuit::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CliffordCircuit c;
  c.n = j.at("n").get<size_t>();
  std::vector<std::pair<size_t, size_t>> edges;
  for (const auto& e : j.at("layout_edges"))
    edges.emplace_back(e.at(0).get<size_t>(), e.at(1).get<size_t>());
  c.layout = Graph::from_edges(c.n, edges);
  for (const auto& g : j.at("gates")) {
    CircuitGate gate;
    gate.g = g.at("g").get<std::string>();
    for (const auto& q : g.at("q")) gate.q.push_back(q.get<size_t>());
    c.gates.push_back(std::move(gate));
  }
  c.validate();
  return c;
}

std::string CliffordCircuit::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["layout_edges"] = nlohmann::json::array();
  for (const auto& [u, v] : layout.edges()) j["layout_edges"].push_back({u, v});
  j["gates"] = nlohmann::json::array();
  for (const CircuitGate& gate : gates)
    j["gates"].push_back({{"g", gate.g}, {"q", gate.q}});
  return j.dump();
}

void CliffordCircuit::validate() const {
  if (layout.num_vertices() != n)
    throw std::invalid_argument("CliffordCircuit: layout size != n");
  for (const CircuitGate& gate : gates) {
    size_t arity = gate_qubits(gate.g);
    if (gate.q.size() != arity)
      throw std::invalid_argument("CliffordCircuit: bad arity for " + gate.g);
    for (size_t q : gate.q)
      if (q >= n) throw std::invalid_argument("CliffordCircuit: qubit out of range");
    if (arity == 2) {
      if (gate.q[0] == gate.q[1])
        throw std::invalid_argument("CliffordCircuit: repeated qubit");
      if (!layout.has_edge(gate.q[0], gate.q[1]))
        throw std::invalid_argument("CliffordCircuit: gate off layout edge");
    }
  }
}

size_t CliffordCircuit::depth() const {
  std::vector<size_t> level(n, 0);
  size_t d = 0;
  for (const CircuitGate& gate : gates) {
    size_t l = 0;
    for (size_t q : gate.q) l = std::max(l, level[q] + 1);
    for (size_t q : gate.q) level[q] = l;
    d = std::max(d, l);
  }
  return d;
}

ReducedInstance reduce_circuit(const CliffordCircuit& c) {
  c.validate();
  std::vector<Primitive> prims = expand(c.gates);

  // Interior sequence of the Hadamard-sandwiched circuit: the outer Hadamard
  // layers become the |+> preparation and the final X-basis measurement; the
  // inner pair of layers joins the interior and is teleported like every
  // other interior Hadamard.
  std::vector<Primitive> seq;
  for (size_t q = 0; q < c.n; ++q) seq.push_back({Gate::H, q});
  seq.insert(seq.end(), prims.begin(), prims.end());
  for (size_t q = 0; q < c.n; ++q) seq.push_back({Gate::H, q});

  size_t h = 0;
  for (const Primitive& p : seq) h += p.g == Gate::H ? 1 : 0;

  ReducedInstance red;
  red.h = h;
  red.push_x = BitMatrix(c.n, h);
  red.push_z = BitMatrix(c.n, h);
  red.output_wire.resize(c.n);
  red.f.map.resize(c.n + h);

  std::vector<size_t> cur(c.n);
  std::iota(cur.begin(), cur.end(), size_t(0));
  for (size_t q = 0; q < c.n; ++q) red.f.map[q] = q;
  std::vector<size_t> scount(c.n + h, 0);
  std::map<std::pair<size_t, size_t>, bool> edge_on;
  auto toggle = [&edge_on](size_t u, size_t v) {
    edge_on[{std::min(u, v), std::max(u, v)}] ^= true;
  };

  size_t next_wire = c.n;
  for (const Primitive& p : seq) {
    if (p.g == Gate::S) {
      scount[cur[p.a]]++;
    } else if (p.g == Gate::CZ) {
      toggle(cur[p.a], cur[p.b]);
      // Pauli frame through CZ: Z_a ^= X_b, Z_b ^= X_a.
      red.push_z.xor_row(p.a, red.push_x.row(p.b));
      red.push_z.xor_row(p.b, red.push_x.row(p.a));
    } else {
      // Teleport the Hadamard: fresh ancilla wire, CZ link, and an X
      // correction on this qubit controlled by the gadget's outcome bit.
      size_t j = red.gadget_wire.size();
      size_t e = next_wire++;
      red.f.map[e] = p.a;
      toggle(cur[p.a], e);
      red.gadget_wire.push_back(cur[p.a]);
      cur[p.a] = e;
      BitVector xr = red.push_x.row(p.a);
      red.push_x.xor_row(p.a, red.push_z.row(p.a));
      red.push_x.xor_row(p.a, xr);  // net effect: swap X and Z frame rows
      red.push_z.xor_row(p.a, xr);
      red.push_z.xor_row(p.a, red.push_x.row(p.a));
      red.push_x.set(p.a, j, !red.push_x.get(p.a, j));
    }
  }
  // Frame through the final outer Hadamard layer: swap X and Z parts.
  std::swap(red.push_x, red.push_z);
  red.output_wire = cur;

  Graph gprime(c.n + h);
  for (const auto& [e, on] : edge_on)
    if (on) gprime.add_edge(e.first, e.second);

  // Per-wire S count (mod 4) before the terminal Hadamard fixes the
  // measurement basis and an outcome flip:
  //   0: <b|H       X basis          2: <b|HZ  = <b^1|H   X basis, flipped
  //   1: <b|HS = <b^1|V   Y, flipped 3: <b|HZS = <b|V     Y basis
  std::string bases(c.n + h, 'X');
  red.flip.assign(c.n + h, false);
  for (size_t w = 0; w < c.n + h; ++w) {
    switch (scount[w] % 4) {
      case 0: break;
      case 1: bases[w] = 'Y'; red.flip[w] = true; break;
      case 2: red.flip[w] = true; break;
      case 3: bases[w] = 'Y'; break;
    }
  }

  red.instance.graph = std::move(gprime);
  red.instance.bases = std::move(bases);
  red.instance.validate();

  red.groups.assign(c.n, {});
  for (size_t w = 0; w < c.n + h; ++w) red.groups[red.f.map[w]].push_back(w);
  size_t bound = primitive_depth(prims, c.n) + 4;
  red.f.r = 0;
  for (const auto& grp : red.groups) red.f.r = std::max(red.f.r, grp.size());
  if (red.f.r > bound)
    throw std::logic_error("reduce_circuit: group size exceeds depth + 4");
  return red;
}

std::vector<double> circuit_distribution(const CliffordCircuit& c) {
  c.validate();
  if (c.n > 14)
    throw std::invalid_argument("circuit_distribution: too many qubits");
  DenseState psi = DenseState::plus_state(c.n);
  for (size_t q = 0; q < c.n; ++q) psi.apply(Gate::H, {q});  // |0^n>
  for (const Primitive& p : expand(c.gates)) {
    if (gate_arity(p.g) == 2)
      psi.apply(p.g, {p.a, p.b});
    else
      psi.apply(p.g, {p.a});
  }
  std::vector<size_t> all(c.n);
  std::iota(all.begin(), all.end(), size_t(0));
  return psi.z_distribution(all);
}

CircuitSampler::CircuitSampler(const CliffordCircuit& c)
    : n_(c.n), red_(reduce_circuit(c)) {
  if (!is_planar(c.layout))
    throw std::invalid_argument("CircuitSampler: layout is not planar");
  if (!validate_coarse_graining(red_.instance.graph, c.layout, red_.f))
    throw std::logic_error("CircuitSampler: invalid wire grouping");
  td_ = preimage(compute_td(c.layout, {}), red_.f);
  uc_ = Tableau::identity(n_);
  for (const Primitive& p : expand(c.gates)) {
    if (gate_arity(p.g) == 2)
      apply_gate(uc_, p.g, {p.a, p.b});
    else
      apply_gate(uc_, p.g, {p.a});
  }
}

BitVector CircuitSampler::draw(Rng& rng, BitVector* g_out) {
  GssResult res = solve_instance(red_.instance, &td_, rng);
  if (res.zero_probability)
    throw std::logic_error("CircuitSampler: unexpected zero-probability flag");

  BitVector x(n_), z(red_.h);
  for (size_t q = 0; q < n_; ++q) {
    size_t w = red_.output_wire[q];
    x.set(q, (res.outcome[w] == '1') != bool(red_.flip[w]));
  }
  for (size_t j = 0; j < red_.h; ++j) {
    size_t w = red_.gadget_wire[j];
    z.set(j, (res.outcome[w] == '1') != bool(red_.flip[w]));
  }

  // g is the image of the sampled string under the Pauli correction P(z);
  // only its X part moves computational basis states.
  BitVector g = x;
  g ^= red_.push_x.mul(z);
  if (g_out) *g_out = g;

  // Uniformize with a random stabilizer U_C Z(s) U_C^dag of U_C|0^n>.
  Pauli zs(n_);
  zs.z = BitVector::random(n_, rng);
  Pauli q = conjugate_pauli(uc_, zs);
  g ^= q.x;
  return g;
}

BitVector simulate_circuit(const CliffordCircuit& c, Rng& rng,
                           BitVector* g_out) {
  return CircuitSampler(c).draw(rng, g_out);
}

}  // namespace gsim
