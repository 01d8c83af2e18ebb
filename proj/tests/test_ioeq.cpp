// Input-output equation coefficients: hand-derived symbolic results on the
// 4- and 5-compartment stars, the structural zeros, forest/determinant
// engine agreement (including a planted-bug check), leak handling against an
// independent cofactor expansion, and coefficient-map bookkeeping.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "lcm/errors.hpp"
#include "lcm/ioeq.hpp"
#include "lcm/mammillary.hpp"
#include "lcm/model.hpp"
#include "lcm/rng.hpp"

using namespace lcm;

namespace {

MultiPoly var(const char* name) { return MultiPoly::variable(Sym::intern(name)); }

}  // namespace

TEST_CASE("star with input at the hub and output on a spoke, n = 4") {
  IOEquation eq = coeffs_forest(make_mammillary(4, 1, 2));
  REQUIRE(eq.n == 4);
  REQUIRE(eq.c.size() == 4);
  REQUIRE(eq.d.count(1) == 1);
  const auto& d = eq.d.at(1);

  CHECK(eq.c[3].to_string() == "1*k12 + 1*k13 + 1*k14 + 1*k21 + 1*k31 + 1*k41");
  CHECK(eq.c[2].to_string() ==
        "1*k12*k13 + 1*k12*k14 + 1*k12*k31 + 1*k12*k41 + 1*k13*k14 + 1*k13*k21 + "
        "1*k13*k41 + 1*k14*k21 + 1*k14*k31");
  CHECK(eq.c[1].to_string() == "1*k12*k13*k14 + 1*k12*k13*k41 + 1*k12*k14*k31 + 1*k13*k14*k21");
  CHECK(eq.c[0].is_zero());

  CHECK(d[2].to_string() == "1*k21");
  CHECK(d[1].to_string() == "1*k13*k21 + 1*k14*k21");
  CHECK(d[0].to_string() == "1*k13*k14*k21");
  CHECK(d[3].is_zero());
}

TEST_CASE("star with input and output on the same spoke, n = 4") {
  IOEquation eq = coeffs_forest(make_mammillary(4, 2, 2));
  const auto& d = eq.d.at(2);
  // Principal minor: top coefficient is 1; the reduced graph loses the edge
  // out of compartment 2, so k12 is absent from every d entry.
  CHECK(d[3] == MultiPoly::constant(BigInt(1)));
  CHECK(d[2].to_string() == "1*k13 + 1*k14 + 1*k21 + 1*k31 + 1*k41");
  CHECK(d[1].to_string() ==
        "1*k13*k14 + 1*k13*k21 + 1*k13*k41 + 1*k14*k21 + 1*k14*k31");
  CHECK(d[0].to_string() == "1*k13*k14*k21");
  // c side is shared across outputs of the same graph.
  CHECK(eq.c[3] == coeffs_forest(make_mammillary(4, 1, 2)).c[3]);
}

TEST_CASE("star with input and output on different spokes, n = 5") {
  IOEquation eq = coeffs_forest(make_mammillary(5, 2, 3));
  const auto& d = eq.d.at(2);
  MultiPoly k12 = var("k12"), k31 = var("k31"), k14 = var("k14"), k15 = var("k15");
  CHECK(d[4].is_zero());
  CHECK(d[3].is_zero());
  CHECK(d[2] == k12 * k31);
  CHECK(d[1] == k12 * k31 * (k14 + k15));
  CHECK(d[0] == k12 * k31 * k14 * k15);
}

TEST_CASE("structural zeros across the families") {
  for (int n = 3; n <= 6; ++n) {
    for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}}) {
      if (n < family_min_n(i, j)) continue;
      Model m = make_mammillary(n, i, j);
      IOEquation eq = coeffs_forest(m);
      CAPTURE(n);
      CAPTURE(i);
      CAPTURE(j);
      CHECK(eq.c[0].is_zero());  // no leaks: A is singular
      const auto& d = eq.d.at(i);
      if (i == j)
        CHECK(d[static_cast<std::size_t>(n - 1)] == MultiPoly::constant(BigInt(1)));
      else
        CHECK(d[static_cast<std::size_t>(n - 1)].is_zero());
    }
  }
}

TEST_CASE("forest engine rejects models outside its regime") {
  // Leak present.
  CHECK_THROWS_AS(coeffs_forest(parse_model(
                      R"({"version":1,"n":3,"edges":[[1,2],[2,3],[3,1]],"in":[1],"out":[2],"leak":[1]})")),
                  InputError);
  // Not strongly connected.
  CHECK_THROWS_AS(coeffs_forest(parse_model(
                      R"({"version":1,"n":3,"edges":[[1,2],[2,3]],"in":[1],"out":[3],"leak":[]})")),
                  InputError);
  // Two inputs.
  CHECK_THROWS_AS(coeffs_forest(parse_model(
                      R"({"version":1,"n":3,"edges":[[1,2],[2,3],[3,1]],"in":[1,2],"out":[3],"leak":[]})")),
                  InputError);
}

TEST_CASE("determinant engine matches an independent cofactor expansion with a leak") {
  // 3-cycle with a leak at 1: A = [[-k21-k01, 0, k13], [k21, -k32, 0],
  // [0, k32, -k13]]; char poly and the (2,1) minor expanded by hand.
  Model m = parse_model(
      R"({"version":1,"n":3,"edges":[[1,2],[2,3],[3,1]],"in":[1],"out":[2],"leak":[1]})");
  ParamPoint pt{{Sym::intern("k21"), Rational(2)},
                {Sym::intern("k32"), Rational(3)},
                {Sym::intern("k13"), Rational(5)},
                {Sym::intern("k01"), Rational(7)}};
  NumericIOEq eq = det_coefficients(m, 2, pt);
  REQUIRE(eq.c.size() == 4);
  REQUIRE(eq.d.at(1).size() == 3);

  // det(sI - A) = (s + k21 + k01)(s + k32)(s + k13) - k21 k32 k13.
  Rational a = Rational(2) + Rational(7), b(3), c(5);
  CHECK(eq.c[3] == Rational(1));
  CHECK(eq.c[2] == a + b + c);
  CHECK(eq.c[1] == a * b + a * c + b * c);
  CHECK(eq.c[0] == a * b * c - Rational(2) * Rational(3) * Rational(5));
  CHECK(eq.c[0] != Rational(0));  // the leak kills the structural zero

  // Signed minor for input 1, output 2: deleting row 1 and column 2 of
  // sI - A leaves [[-k21, 0], [0, s + k13]], and the (-1)^{1+2} sign turns
  // its determinant into d(s) = k21 (s + k13).
  CHECK(eq.d.at(1)[2] == Rational(0));
  CHECK(eq.d.at(1)[1] == Rational(2));
  CHECK(eq.d.at(1)[0] == Rational(2) * Rational(5));
}

TEST_CASE("engines agree bit-exactly on the stars") {
  for (auto [i, j] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 2}, {2, 3}}) {
    Model m = make_mammillary(5, i, j);
    CrossValidation cv = cross_validate(m, 4, 99);
    CAPTURE(i);
    CAPTURE(j);
    CHECK(cv.pass);
    CHECK(cv.trials == 4);
    CHECK_FALSE(cv.first_failure.has_value());
  }
}

TEST_CASE("cross-validation catches a planted sign bug") {
  CrossValidation cv = cross_validate(make_mammillary(4, 1, 2), 3, 7, /*inject_sign_flip=*/true);
  CHECK_FALSE(cv.pass);
  REQUIRE(cv.first_failure.has_value());
  CHECK(cv.first_failure->forest_value != cv.first_failure->det_value);
  CHECK(cv.first_failure->coefficient.substr(0, 1) == "d");
}

TEST_CASE("double-precision engine tracks the exact one") {
  Model m = make_mammillary(4, 1, 2);
  Rng rng(11);
  // Order-one coordinates: that is the scale the double engine serves (the
  // fiber solver); exact comparisons at huge points live in cross_validate.
  ParamPoint pt;
  for (const Sym& s : m.parameters())
    pt[s] = Rational(rng.uniform_int(1, 40), rng.uniform_int(1, 8));
  std::map<Sym, double> ptd;
  for (const auto& [s, v] : pt) ptd[s] = to_double(v);
  NumericIOEq exact = det_coefficients(m, 2, pt);
  NumericIOEqD approx = det_coefficients_d(m, 2, ptd);
  for (std::size_t k = 0; k < exact.c.size(); ++k) {
    double want = to_double(exact.c[k]);
    CHECK(approx.c[k] == doctest::Approx(want).epsilon(1e-9));
  }
  for (std::size_t k = 0; k < exact.d.at(1).size(); ++k) {
    double want = to_double(exact.d.at(1)[k]);
    CHECK(approx.d.at(1)[k] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("coefficient map ordering, naming, and drops") {
  CoefficientMap cm = coefficient_map(make_mammillary(4, 1, 2));
  std::vector<std::string> names;
  for (const auto& e : cm.entries) names.push_back(e.name);
  CHECK(names == std::vector<std::string>{"c3", "c2", "c1", "d2", "d1", "d0"});
  REQUIRE(cm.dropped.size() == 2);
  CHECK(cm.dropped[0].first == "c0");
  CHECK(cm.dropped[0].second == Rational(0));
  CHECK(cm.dropped[1].first == "d3");
  CHECK(cm.dropped[1].second == Rational(0));
  CHECK(cm.symbols.size() == 6);
  CHECK(cm.n == 4);

  // Input = output: the constant-1 top d coefficient is dropped too.
  CoefficientMap same = coefficient_map(make_mammillary(4, 2, 2));
  bool saw_d3 = false;
  for (const auto& [name, value] : same.dropped)
    if (name == "d3") {
      saw_d3 = true;
      CHECK(value == Rational(1));
    }
  CHECK(saw_d3);
}

TEST_CASE("coefficient map method selection") {
  Model leaky = parse_model(
      R"({"version":1,"n":3,"edges":[[1,2],[2,3],[3,1]],"in":[1],"out":[2],"leak":[1]})");
  // The forest engine cannot serve this model...
  CHECK_THROWS_AS(coefficient_map(leaky, Method::Forest), InputError);
  // ...and the determinant engine is evaluation-only, so no symbolic map.
  CHECK_THROWS_AS(coefficient_map(leaky, Method::Det), InputError);
  // Default dispatch falls back to the determinant side for values.
  auto fn = make_det_coeff_fn(leaky);
  CHECK_FALSE(fn->names().empty());

  CHECK(parse_method("forest") == Method::Forest);
  CHECK(parse_method("det") == Method::Det);
  CHECK(parse_method("both") == Method::Both);
  CHECK_THROWS_AS(parse_method("magic"), InputError);
  CHECK(method_name(Method::Both) == "both");
}

TEST_CASE("symbolic and determinant coefficient functions agree") {
  Model m = make_mammillary(4, 2, 3);
  auto sym = make_symbolic_coeff_fn(coefficient_map(m));
  auto det = make_det_coeff_fn(m);
  REQUIRE(sym->names() == det->names());
  REQUIRE(sym->symbols() == det->symbols());

  Rng rng(21);
  for (int t = 0; t < 5; ++t) {
    ParamPoint pt = random_rational_point(m.parameters(), rng);
    CHECK(sym->values(pt) == det->values(pt));
    CHECK(sym->jacobian(pt) == det->jacobian(pt));
  }
}
