#ifndef LCM_MODEL_HPP
#define LCM_MODEL_HPP

#include <compare>
#include <functional>
#include <string>
#include <vector>

#include "lcm/multipoly.hpp"
#include "lcm/symbol.hpp"

namespace lcm {

// Directed edge from -> to. The transfer it carries is named k_{to,from}:
// edge (1,2) is the flow from compartment 1 into compartment 2 with rate k21.
struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

/* Linear compartmental model: digraph on vertices 1..n plus input, output and
 * leak vertex sets. Kept canonical: edges sorted by (from, to) without
 * duplicates or self-loops, vertex sets sorted without duplicates. */
struct Model {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<int> inputs;
  std::vector<int> outputs;
  std::vector<int> leaks;

  bool has_edge(int from, int to) const;

  // Rate symbol k_{to,from} for an edge, k_{0,j} for the leak at j. Indices
  // above 9 get an underscore separator so names stay unambiguous.
  static Sym edge_symbol(int from, int to);
  static Sym leak_symbol(int j);

  // All parameter symbols (edges then leaks as symbols), sorted by name.
  std::vector<Sym> parameters() const;

  bool operator==(const Model&) const = default;
};

// Validates and canonicalizes a version-1 model document. Throws InputError
// with a specific message on malformed JSON, a bad version, indices out of
// 1..n, duplicate edges, or self-loops.
Model parse_model(const std::string& json_text);

// Inverse of parse_model up to whitespace: compact JSON with keys in the
// order version, n, edges, in, out, leak and edges sorted lexicographically.
std::string serialize_model(const Model& m);

struct ValidationReport {
  bool strongly_connected = false;
  int num_inputs = 0;
  int num_outputs = 0;
  int num_leaks = 0;
  // Forest-sum coefficient formula applies: strongly connected, exactly one
  // input, one output, no leaks.
  bool forest_formula_applicable = false;
};

ValidationReport validate(const Model& m);

/* Compartmental matrix A: for an edge j -> i, a_ij = k_{ij}; the diagonal
 * a_jj collects -sum of rates leaving j (edges out of j, plus the leak at j
 * if present); all other entries are zero. Columns without a leak sum to
 * zero. */
SymbolicMatrix compartmental_matrix(const Model& m);

// The model with every edge leaving `output` removed (inputs/outputs/leaks
// unchanged). Throws InputError if `output` is not an output of m.
Model reduced_graph(const Model& m, int output);

// Bijection of 1..n. to(v) is the image of v.
struct Permutation {
  std::vector<int> image;  // image[v] for v = 1..n; image[0] unused

  static Permutation identity(int n);
  int n() const { return static_cast<int>(image.size()) - 1; }
  int to(int v) const { return image.at(static_cast<std::size_t>(v)); }
  bool is_identity() const;
  Permutation inverse() const;
  Permutation compose(const Permutation& then) const;  // v -> then(this(v))
  std::string cycles() const;  // "(2 3)(4 5)" notation; "id" for identity

  bool operator==(const Permutation&) const = default;
};

/* Graph automorphisms fixing the input, output and leak sets setwise.
 * Backtracking over vertex images with degree/role signature pruning;
 * permutations are visited in lexicographic order of (image(1), image(2),
 * ...), so the identity always comes first. The visitor returns false to
 * stop early. */
void for_each_automorphism(const Model& m,
                           const std::function<bool(const Permutation&)>& visit);

// Exhaustive list. Throws InputError when n exceeds the bound: past that the
// group can be factorially large and the caller should stream instead.
std::vector<Permutation> automorphisms(const Model& m, int bound = 12);

}  // namespace lcm

#endif
