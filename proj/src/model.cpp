#include "lcm/model.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>

#include "lcm/errors.hpp"

namespace lcm {

using nlohmann::ordered_json;

bool Model::has_edge(int from, int to) const {
  return std::binary_search(edges.begin(), edges.end(), Edge{from, to});
}

namespace {

std::string index_part(int v) { return std::to_string(v); }

}  // namespace

Sym Model::edge_symbol(int from, int to) {
  // k_{to,from}; underscore once any index needs two digits.
  if (to <= 9 && from <= 9) return Sym::intern("k" + index_part(to) + index_part(from));
  return Sym::intern("k" + index_part(to) + "_" + index_part(from));
}

Sym Model::leak_symbol(int j) {
  if (j <= 9) return Sym::intern("k0" + index_part(j));
  return Sym::intern("k0_" + index_part(j));
}

std::vector<Sym> Model::parameters() const {
  std::vector<Sym> out;
  for (const Edge& e : edges) out.push_back(edge_symbol(e.from, e.to));
  for (int j : leaks) out.push_back(leak_symbol(j));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<int> parse_vertex_set(const ordered_json& j, const std::string& key, int n) {
  if (!j.is_array()) throw InputError("model field '" + key + "' must be an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw InputError("model field '" + key + "' must hold integers");
    int x = v.get<int>();
    if (x < 1 || x > n)
      throw InputError("vertex " + std::to_string(x) + " in '" + key + "' out of range 1.." +
                       std::to_string(n));
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw InputError("duplicate vertex in '" + key + "'");
  return out;
}

}  // namespace

Model parse_model(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed model document: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("model document must be a JSON object");
  for (const char* key : {"version", "n", "edges", "in", "out", "leak"})
    if (!doc.contains(key)) throw InputError(std::string("model document missing '") + key + "'");

  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
    throw InputError("unsupported model document version (expected 1)");
  if (!doc["n"].is_number_integer() || doc["n"].get<int>() < 1)
    throw InputError("model field 'n' must be a positive integer");

  Model m;
  m.n = doc["n"].get<int>();

  if (!doc["edges"].is_array()) throw InputError("model field 'edges' must be an array");
  std::set<Edge> seen;
  for (const auto& pair : doc["edges"]) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer())
      throw InputError("each edge must be a [from, to] pair of integers");
    Edge e{pair[0].get<int>(), pair[1].get<int>()};
    if (e.from < 1 || e.from > m.n || e.to < 1 || e.to > m.n)
      throw InputError("edge [" + std::to_string(e.from) + "," + std::to_string(e.to) +
                       "] out of range 1.." + std::to_string(m.n));
    if (e.from == e.to)
      throw InputError("self-loop at vertex " + std::to_string(e.from) + " is not allowed");
    if (!seen.insert(e).second)
      throw InputError("duplicate edge [" + std::to_string(e.from) + "," +
                       std::to_string(e.to) + "]");
  }
  m.edges.assign(seen.begin(), seen.end());

  m.inputs = parse_vertex_set(doc["in"], "in", m.n);
  m.outputs = parse_vertex_set(doc["out"], "out", m.n);
  m.leaks = parse_vertex_set(doc["leak"], "leak", m.n);
  return m;
}

std::string serialize_model(const Model& m) {
  ordered_json doc;
  doc["version"] = 1;
  doc["n"] = m.n;
  ordered_json edges = ordered_json::array();
  std::vector<Edge> sorted = m.edges;
  std::sort(sorted.begin(), sorted.end());
  for (const Edge& e : sorted) edges.push_back({e.from, e.to});
  doc["edges"] = std::move(edges);
  doc["in"] = m.inputs;
  doc["out"] = m.outputs;
  doc["leak"] = m.leaks;
  return doc.dump();
}

namespace {

// Reachability of every vertex from `start` along the given adjacency.
bool reaches_all(int n, const std::vector<std::vector<int>>& adj, int start) {
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

}  // namespace

ValidationReport validate(const Model& m) {
  ValidationReport r;
  r.num_inputs = static_cast<int>(m.inputs.size());
  r.num_outputs = static_cast<int>(m.outputs.size());
  r.num_leaks = static_cast<int>(m.leaks.size());

  std::vector<std::vector<int>> fwd(static_cast<std::size_t>(m.n) + 1);
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(m.n) + 1);
  for (const Edge& e : m.edges) {
    fwd[static_cast<std::size_t>(e.from)].push_back(e.to);
    rev[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  r.strongly_connected = m.n >= 1 && reaches_all(m.n, fwd, 1) && reaches_all(m.n, rev, 1);
  r.forest_formula_applicable = r.strongly_connected && r.num_inputs == 1 &&
                                r.num_outputs == 1 && r.num_leaks == 0;
  return r;
}

SymbolicMatrix compartmental_matrix(const Model& m) {
  SymbolicMatrix a = SymbolicMatrix::zero(m.n);
  for (const Edge& e : m.edges) {
    MultiPoly rate = MultiPoly::variable(Model::edge_symbol(e.from, e.to));
    // Flow from e.from into e.to: enters row e.to, leaves the diagonal of
    // column e.from.
    a.at(e.to, e.from) = a.at(e.to, e.from) + rate;
    a.at(e.from, e.from) = a.at(e.from, e.from) - rate;
  }
  for (int j : m.leaks)
    a.at(j, j) = a.at(j, j) - MultiPoly::variable(Model::leak_symbol(j));
  return a;
}

Model reduced_graph(const Model& m, int output) {
  if (!std::binary_search(m.outputs.begin(), m.outputs.end(), output))
    throw InputError("reduced_graph: vertex " + std::to_string(output) + " is not an output");
  Model r = m;
  r.edges.clear();
  for (const Edge& e : m.edges)
    if (e.from != output) r.edges.push_back(e);
  return r;
}

Permutation Permutation::identity(int n) {
  Permutation p;
  p.image.resize(static_cast<std::size_t>(n) + 1);
  for (int v = 0; v <= n; ++v) p.image[static_cast<std::size_t>(v)] = v;
  return p;
}

bool Permutation::is_identity() const {
  for (int v = 1; v <= n(); ++v)
    if (to(v) != v) return false;
  return true;
}

Permutation Permutation::inverse() const {
  Permutation p = identity(n());
  for (int v = 1; v <= n(); ++v) p.image[static_cast<std::size_t>(to(v))] = v;
  return p;
}

Permutation Permutation::compose(const Permutation& then) const {
  Permutation p = identity(n());
  for (int v = 1; v <= n(); ++v) p.image[static_cast<std::size_t>(v)] = then.to(to(v));
  return p;
}

std::string Permutation::cycles() const {
  std::vector<char> done(static_cast<std::size_t>(n()) + 1, 0);
  std::string out;
  for (int v = 1; v <= n(); ++v) {
    if (done[static_cast<std::size_t>(v)] || to(v) == v) continue;
    out += "(";
    int w = v;
    bool first = true;
    while (!done[static_cast<std::size_t>(w)]) {
      done[static_cast<std::size_t>(w)] = 1;
      if (!first) out += " ";
      first = false;
      out += std::to_string(w);
      w = to(w);
    }
    out += ")";
  }
  return out.empty() ? "id" : out;
}

namespace {

struct VertexSignature {
  int outdeg = 0;
  int indeg = 0;
  bool in = false, out = false, leak = false;
  auto operator<=>(const VertexSignature&) const = default;
};

}  // namespace

void for_each_automorphism(const Model& m,
                           const std::function<bool(const Permutation&)>& visit) {
  int n = m.n;
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n) + 1,
                                     std::vector<char>(static_cast<std::size_t>(n) + 1, 0));
  std::vector<VertexSignature> sig(static_cast<std::size_t>(n) + 1);
  for (const Edge& e : m.edges) {
    adj[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)] = 1;
    ++sig[static_cast<std::size_t>(e.from)].outdeg;
    ++sig[static_cast<std::size_t>(e.to)].indeg;
  }
  for (int v : m.inputs) sig[static_cast<std::size_t>(v)].in = true;
  for (int v : m.outputs) sig[static_cast<std::size_t>(v)].out = true;
  for (int v : m.leaks) sig[static_cast<std::size_t>(v)].leak = true;

  std::vector<int> image(static_cast<std::size_t>(n) + 1, 0);
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  bool stopped = false;

  std::function<void(int)> assign = [&](int v) {
    if (stopped) return;
    if (v > n) {
      Permutation p;
      p.image = image;
      if (!visit(p)) stopped = true;
      return;
    }
    for (int w = 1; w <= n && !stopped; ++w) {
      if (used[static_cast<std::size_t>(w)]) continue;
      if (sig[static_cast<std::size_t>(v)] != sig[static_cast<std::size_t>(w)]) continue;
      // Edge structure must be preserved against every vertex already placed.
      bool ok = true;
      for (int u = 1; u < v && ok; ++u) {
        int iu = image[static_cast<std::size_t>(u)];
        if (adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] !=
            adj[static_cast<std::size_t>(iu)][static_cast<std::size_t>(w)])
          ok = false;
        if (adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] !=
            adj[static_cast<std::size_t>(w)][static_cast<std::size_t>(iu)])
          ok = false;
      }
      if (!ok) continue;
      image[static_cast<std::size_t>(v)] = w;
      used[static_cast<std::size_t>(w)] = 1;
      assign(v + 1);
      used[static_cast<std::size_t>(w)] = 0;
      image[static_cast<std::size_t>(v)] = 0;
    }
  };
  assign(1);
}

std::vector<Permutation> automorphisms(const Model& m, int bound) {
  if (m.n > bound)
    throw InputError("automorphisms: n = " + std::to_string(m.n) + " exceeds bound " +
                     std::to_string(bound));
  std::vector<Permutation> out;
  for_each_automorphism(m, [&](const Permutation& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

}  // namespace lcm
