// Model document handling: JSON parse/serialize round-trips and every
// rejection path, the compartmental matrix (column sums, leak placement,
// relabeling equivariance), and automorphism enumeration on the star graphs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "lcm/errors.hpp"
#include "lcm/mammillary.hpp"
#include "lcm/model.hpp"

using namespace lcm;

namespace {

const char* kStar12 =
    R"({"version":1,"n":4,"edges":[[1,2],[1,3],[1,4],[2,1],[3,1],[4,1]],"in":[1],"out":[2],"leak":[]})";

// sigma applied to a model: vertices relabeled, canonical form restored.
Model relabel(const Model& m, const Permutation& sigma) {
  Model out;
  out.n = m.n;
  for (const Edge& e : m.edges) out.edges.push_back({sigma.to(e.from), sigma.to(e.to)});
  for (int v : m.inputs) out.inputs.push_back(sigma.to(v));
  for (int v : m.outputs) out.outputs.push_back(sigma.to(v));
  for (int v : m.leaks) out.leaks.push_back(sigma.to(v));
  std::sort(out.edges.begin(), out.edges.end());
  std::sort(out.inputs.begin(), out.inputs.end());
  std::sort(out.outputs.begin(), out.outputs.end());
  std::sort(out.leaks.begin(), out.leaks.end());
  return out;
}

}  // namespace

TEST_CASE("parse and serialize round-trip") {
  Model m = parse_model(kStar12);
  CHECK(m.n == 4);
  CHECK(m.edges.size() == 6);
  CHECK(m.inputs == std::vector<int>{1});
  CHECK(m.outputs == std::vector<int>{2});
  CHECK(m.leaks.empty());
  CHECK(m.has_edge(1, 2));
  CHECK_FALSE(m.has_edge(2, 3));

  CHECK(serialize_model(m) == kStar12);
  CHECK(parse_model(serialize_model(m)) == m);

  // Unsorted input canonicalizes.
  Model shuffled = parse_model(
      R"({"version":1,"n":4,"edges":[[4,1],[1,2],[3,1],[1,4],[2,1],[1,3]],"in":[1],"out":[2],"leak":[]})");
  CHECK(shuffled == m);
}

TEST_CASE("parse rejects malformed documents") {
  CHECK_THROWS_AS(parse_model("not json"), InputError);
  CHECK_THROWS_AS(parse_model(R"({"version":2,"n":2,"edges":[],"in":[],"out":[],"leak":[]})"),
                  InputError);
  CHECK_THROWS_AS(parse_model(R"({"n":2,"edges":[],"in":[],"out":[],"leak":[]})"), InputError);
  CHECK_THROWS_AS(parse_model(R"({"version":1,"n":0,"edges":[],"in":[],"out":[],"leak":[]})"),
                  InputError);
  // Vertex out of range, in each field.
  CHECK_THROWS_AS(
      parse_model(R"({"version":1,"n":2,"edges":[[1,3]],"in":[1],"out":[1],"leak":[]})"),
      InputError);
  CHECK_THROWS_AS(
      parse_model(R"({"version":1,"n":2,"edges":[[1,2]],"in":[3],"out":[1],"leak":[]})"),
      InputError);
  CHECK_THROWS_AS(
      parse_model(R"({"version":1,"n":2,"edges":[[1,2]],"in":[1],"out":[0],"leak":[]})"),
      InputError);
  CHECK_THROWS_AS(
      parse_model(R"({"version":1,"n":2,"edges":[[1,2]],"in":[1],"out":[1],"leak":[5]})"),
      InputError);
  // Self-loop and duplicate edge.
  CHECK_THROWS_AS(
      parse_model(R"({"version":1,"n":2,"edges":[[1,1]],"in":[1],"out":[1],"leak":[]})"),
      InputError);
  CHECK_THROWS_AS(
      parse_model(R"({"version":1,"n":2,"edges":[[1,2],[1,2]],"in":[1],"out":[1],"leak":[]})"),
      InputError);
}

TEST_CASE("parameter symbols and naming") {
  Model m = parse_model(kStar12);
  std::vector<std::string> names;
  for (const Sym& s : m.parameters()) names.push_back(s.name());
  CHECK(names == std::vector<std::string>{"k12", "k13", "k14", "k21", "k31", "k41"});

  CHECK(Model::edge_symbol(1, 2).name() == "k21");  // flow 1 -> 2 carries k21
  CHECK(Model::leak_symbol(3).name() == "k03");
  // Two-digit indices get a separator.
  CHECK(Model::edge_symbol(10, 3).name() == "k3_10");
  CHECK(Model::edge_symbol(3, 10).name() == "k10_3");
  CHECK(Model::leak_symbol(12).name() == "k0_12");
}

TEST_CASE("validation report") {
  ValidationReport star = validate(parse_model(kStar12));
  CHECK(star.strongly_connected);
  CHECK(star.num_inputs == 1);
  CHECK(star.num_outputs == 1);
  CHECK(star.num_leaks == 0);
  CHECK(star.forest_formula_applicable);

  // A leak keeps the graph strongly connected but blocks the forest formula.
  ValidationReport leaky = validate(parse_model(
      R"({"version":1,"n":3,"edges":[[1,2],[2,3],[3,1]],"in":[1],"out":[2],"leak":[1]})"));
  CHECK(leaky.strongly_connected);
  CHECK(leaky.num_leaks == 1);
  CHECK_FALSE(leaky.forest_formula_applicable);

  // One-directional path is not strongly connected.
  ValidationReport path = validate(parse_model(
      R"({"version":1,"n":3,"edges":[[1,2],[2,3]],"in":[1],"out":[3],"leak":[]})"));
  CHECK_FALSE(path.strongly_connected);
  CHECK_FALSE(path.forest_formula_applicable);
}

TEST_CASE("compartmental matrix entries and column sums") {
  Model m = parse_model(
      R"({"version":1,"n":3,"edges":[[1,2],[2,1],[2,3],[3,1]],"in":[1],"out":[1],"leak":[2]})");
  SymbolicMatrix a = compartmental_matrix(m);

  // Off-diagonal (i,j) is the rate j -> i.
  CHECK(a.at(2, 1).to_string() == "1*k21");
  CHECK(a.at(1, 2).to_string() == "1*k12");
  CHECK(a.at(3, 2).to_string() == "1*k32");
  CHECK(a.at(1, 3).to_string() == "1*k13");
  CHECK(a.at(3, 1).is_zero());

  // Column sums: zero without a leak, -k0j with one.
  for (int j = 1; j <= 3; ++j) {
    MultiPoly col;
    for (int i = 1; i <= 3; ++i) col = col + a.at(i, j);
    if (j == 2)
      CHECK(col == -MultiPoly::variable(Model::leak_symbol(2)));
    else
      CHECK(col.is_zero());
  }
}

TEST_CASE("matrix is equivariant under relabeling") {
  Model m = parse_model(kStar12);
  Permutation sigma;                    // swap 3 and 4
  sigma.image = {0, 1, 2, 4, 3};
  Model relabeled = relabel(m, sigma);
  SymbolicMatrix a = compartmental_matrix(m);
  SymbolicMatrix b = compartmental_matrix(relabeled);
  // b[sigma i, sigma j] must be a[i,j] with symbols renamed the same way;
  // star relabeling by an automorphism maps rate symbols to rate symbols.
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) {
      if (i == j) continue;
      const MultiPoly& orig = a.at(i, j);
      const MultiPoly& image = b.at(sigma.to(i), sigma.to(j));
      if (orig.is_zero()) {
        CHECK(image.is_zero());
      } else {
        CHECK(image == MultiPoly::variable(Model::edge_symbol(sigma.to(j), sigma.to(i))));
      }
    }
}

TEST_CASE("reduced graph removes edges leaving the output") {
  Model m = parse_model(kStar12);
  Model r = reduced_graph(m, 2);
  CHECK(r.n == 4);
  CHECK_FALSE(r.has_edge(2, 1));
  CHECK(r.has_edge(1, 2));
  CHECK(r.edges.size() == 5);
  CHECK_THROWS_AS(reduced_graph(m, 3), InputError);
}

TEST_CASE("permutation basics") {
  Permutation id = Permutation::identity(4);
  CHECK(id.is_identity());
  CHECK(id.cycles() == "id");

  Permutation swap34;
  swap34.image = {0, 1, 2, 4, 3};
  CHECK_FALSE(swap34.is_identity());
  CHECK(swap34.cycles() == "(3 4)");
  CHECK(swap34.inverse() == swap34);
  CHECK(swap34.compose(swap34) == id);

  Permutation rot;
  rot.image = {0, 2, 3, 1, 4};
  CHECK(rot.cycles() == "(1 2 3)");
  CHECK(rot.compose(rot.inverse()) == id);
  CHECK(rot.inverse().compose(rot) == id);
}

TEST_CASE("automorphisms of the star with separate input and output") {
  Model m = parse_model(kStar12);
  auto aut = automorphisms(m);
  REQUIRE(aut.size() == 2);
  CHECK(aut[0].is_identity());
  CHECK(aut[1].cycles() == "(3 4)");
}

TEST_CASE("automorphism group sizes across star families") {
  // Centered input and output: all n-1 spokes interchangeable.
  auto factorial = [](int k) {
    std::size_t f = 1;
    for (int i = 2; i <= k; ++i) f *= static_cast<std::size_t>(i);
    return f;
  };
  for (int n = 3; n <= 6; ++n) {
    Model m = make_mammillary(n, 1, 1);
    CHECK(automorphisms(m).size() == factorial(n - 1));
  }
  // Input at 2, output at 3: spokes 4..n interchangeable.
  for (int n = 4; n <= 7; ++n) {
    Model m = make_mammillary(n, 2, 3);
    CHECK(automorphisms(m).size() == factorial(n - 3));
  }
}

TEST_CASE("automorphisms form a group and respect edge structure") {
  Model m = make_mammillary(5, 2, 2);
  auto aut = automorphisms(m);
  REQUIRE(aut.size() == 6);  // center and vertex 2 pinned; 3,4,5 free

  // Every automorphism fixes the model under relabeling.
  for (const Permutation& s : aut) CHECK(relabel(m, s) == m);

  // Closure under composition and inverse.
  std::set<std::vector<int>> images;
  for (const Permutation& s : aut) images.insert(s.image);
  for (const Permutation& s : aut) {
    CHECK(images.count(s.inverse().image) == 1);
    for (const Permutation& t : aut) CHECK(images.count(s.compose(t).image) == 1);
  }
}

TEST_CASE("streaming enumeration stops when the visitor declines") {
  Model m = make_mammillary(5, 1, 1);
  int seen = 0;
  for_each_automorphism(m, [&](const Permutation&) {
    ++seen;
    return seen < 3;
  });
  CHECK(seen == 3);

  // First permutation visited is always the identity.
  bool first = true;
  for_each_automorphism(m, [&](const Permutation& s) {
    if (first) CHECK(s.is_identity());
    first = false;
    return false;
  });
}

TEST_CASE("automorphisms refuses factorially large stars") {
  Model big = make_mammillary(14, 1, 1);
  CHECK_THROWS_AS(automorphisms(big), InputError);
  // Streaming still works: count a few and bail.
  int seen = 0;
  for_each_automorphism(big, [&](const Permutation&) { return ++seen < 5; });
  CHECK(seen == 5);
}
