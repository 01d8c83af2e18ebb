// End-to-end acceptance run. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails.
//
//  1. The forest and determinant engines agree bit-exactly on every star
//     family member and on random strongly connected digraphs.
//  2. The hand-checked coefficient strings and forest enumerations of the
//     4-compartment star with hub input and spoke output.
//  3. The full classification table up to n = 8 matches the proven
//     per-parameter classes, including the conjecture-tagged family.
//  4. The structural coefficient identities hold exactly for n = 3..8.
//  5. Parameter recovery round-trips from coefficient lists, float and exact.
//  6. Every swappable parameter has a verified symmetry witness, and the
//     hub-input family's return rate has verified alternate points.
//  7. Exact Jacobians match finite differences, and model identifiability
//     matches the family characterization.
//  8. The command-line table run is byte-for-byte reproducible.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "lcm/errors.hpp"
#include "lcm/forests.hpp"
#include "lcm/ident.hpp"
#include "lcm/ioeq.hpp"
#include "lcm/mammillary.hpp"
#include "lcm/model.hpp"
#include "lcm/multipoly.hpp"
#include "lcm/rng.hpp"

using namespace lcm;

namespace {

int failures = 0;

void report(int num, bool ok, const std::string& text) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", num, text.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

constexpr std::pair<int, int> kFamilies[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}};

// k13..k1n: rates into the hub from spokes 3..n.
std::vector<Sym> incoming_syms(int n, int first = 3) {
  std::vector<Sym> s;
  for (int j = first; j <= n; ++j) s.push_back(Model::edge_symbol(j, 1));
  return s;
}

Model random_sc_model(Rng& rng) {
  for (;;) {
    Model m;
    m.n = static_cast<int>(rng.uniform_int(3, 6));
    for (int u = 1; u <= m.n; ++u)
      for (int v = 1; v <= m.n; ++v)
        if (u != v && rng.bernoulli(0.35)) m.edges.push_back({u, v});
    m.inputs = {static_cast<int>(rng.uniform_int(1, m.n))};
    m.outputs = {static_cast<int>(rng.uniform_int(1, m.n))};
    if (validate(m).forest_formula_applicable) return m;
  }
}

// Coefficient lists (c then d, derivative order, both sized n) at an exact
// point, converted to double.
std::pair<std::vector<double>, std::vector<double>> coeff_lists_at(const Model& m, int in,
                                                                   int out,
                                                                   const ParamPoint& pt) {
  NumericIOEq eq = det_coefficients(m, out, pt);
  std::vector<double> c, d;
  for (int k = 0; k < m.n; ++k) c.push_back(to_double(eq.c[static_cast<std::size_t>(k)]));
  for (const Rational& v : eq.d.at(in)) d.push_back(to_double(v));
  return {c, d};
}

std::set<std::set<std::string>> forest_name_sets(const std::vector<Forest>& fs) {
  std::set<std::set<std::string>> out;
  for (const Forest& f : fs) {
    std::set<std::string> names;
    for (const Edge& e : f.edges) names.insert(Model::edge_symbol(e.from, e.to).name());
    out.insert(names);
  }
  return out;
}

// Proven classification of family (in, out) at size n, by parameter name.
VerdictClass oracle_class(int in, int out, int n, const std::string& p) {
  if (in == 1 && out == 1) return VerdictClass::Sling;
  if (in == 1 && out == 2) {
    return p == "k21" ? VerdictClass::GloballyIdentifiable : VerdictClass::Sling;
  }
  if ((in == 2 && out == 1) || (in == 2 && out == 2)) {
    if (p == "k12") return VerdictClass::GloballyIdentifiable;
    if (p == "k21") return VerdictClass::GenericallyGloballyIdentifiable;
    return VerdictClass::Sling;
  }
  // (2,3): the far spokes' incoming rates stay locally identifiable.
  if (n == 4) {
    return p == "k14" ? VerdictClass::GenericallyGloballyIdentifiable
                      : VerdictClass::Unidentifiable;
  }
  for (int j = 4; j <= n; ++j)
    if (p == Model::edge_symbol(j, 1).name()) return VerdictClass::Sling;
  return VerdictClass::Unidentifiable;
}

std::string run_cli(const std::string& args, int& status) {
  std::string cmd = std::string(LCM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw InternalError("popen failed");
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int rc = pclose(pipe);
  status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return out;
}

// ---------------------------------------------------------------- criterion 1

bool criterion_engines(std::string& text) {
  int models = 0;
  for (auto [i, j] : kFamilies)
    for (int n = family_min_n(i, j); n <= 7; ++n) {
      CrossValidation cv = cross_validate(make_mammillary(n, i, j), 20, 1000 + n);
      ++models;
      if (!cv.pass) {
        text = "family " + FamilyId{n, i, j}.label() + " n=" + std::to_string(n) +
               " diverged at coefficient " + cv.first_failure->coefficient;
        return false;
      }
    }

  Rng rng(4242);
  for (int t = 0; t < 50; ++t) {
    Model m = random_sc_model(rng);
    CrossValidation cv = cross_validate(m, 20, rng.fork(static_cast<std::uint64_t>(t)).next());
    ++models;
    if (!cv.pass) {
      text = "random digraph " + std::to_string(t) + " (" + serialize_model(m) +
             ") diverged at coefficient " + cv.first_failure->coefficient;
      return false;
    }
  }
  text = "forest and determinant engines agree bit-exactly at 20 points each on " +
         std::to_string(models) + " models (21 star members + 50 random digraphs)";
  return true;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_star4_oracles(std::string& text) {
  Model m = make_mammillary(4, 1, 2);
  IOEquation eq = coeffs_forest(m);
  const auto& d = eq.d.at(1);
  std::vector<std::pair<std::string, std::string>> want = {
      {eq.c[3].to_string(), "1*k12 + 1*k13 + 1*k14 + 1*k21 + 1*k31 + 1*k41"},
      {eq.c[2].to_string(),
       "1*k12*k13 + 1*k12*k14 + 1*k12*k31 + 1*k12*k41 + 1*k13*k14 + 1*k13*k21 + 1*k13*k41 + "
       "1*k14*k21 + 1*k14*k31"},
      {eq.c[1].to_string(), "1*k12*k13*k14 + 1*k12*k13*k41 + 1*k12*k14*k31"
                            " + 1*k13*k14*k21"},
      {d[2].to_string(), "1*k21"},
      {d[1].to_string(), "1*k13*k21 + 1*k14*k21"},
      {d[0].to_string(), "1*k13*k14*k21"},
  };
  for (const auto& [got, expect] : want)
    if (got != expect) {
      text = "coefficient mismatch: got \"" + got + "\", want \"" + expect + "\"";
      return false;
    }
  if (!eq.c[0].is_zero() || !d[3].is_zero()) {
    text = "structural zeros c0, d3 violated";
    return false;
  }

  auto three = forest_name_sets(spanning_incoming_forests(m.n, m.edges, 3));
  std::set<std::set<std::string>> want3{{"k12", "k13", "k14"},
                                       {"k21", "k13", "k14"},
                                       {"k12", "k31", "k14"},
                                       {"k12", "k13", "k41"}};
  if (three != want3) {
    text = "3-edge forest enumeration of the 4-star is wrong";
    return false;
  }
  auto two = forest_name_sets(
      spanning_incoming_forests(4, reduced_graph(m, 2).edges, 2, std::make_pair(1, 2)));
  std::set<std::set<std::string>> want2{{"k21", "k13"}, {"k21", "k14"}};
  if (two != want2) {
    text = "connecting 2-edge forest enumeration of the reduced 4-star is wrong";
    return false;
  }
  text = "all six coefficient polynomials and both forest enumerations of the 4-star "
         "match the hand-checked values";
  return true;
}

// ---------------------------------------------------------------- criterion 3

bool criterion_table(std::string& text) {
  ClassifyConfig cfg;
  cfg.starts = 100;
  ClassificationTable table = classification_table(8, cfg);

  int checked = 0;
  std::ostringstream bad;
  int mismatches = 0;
  for (const TableCell& cell : table.cells) {
    const FamilyId& f = cell.family;
    bool expect_ident = !(f.in == 2 && f.out == 3);
    if (cell.model_ident.identifiable != expect_ident) {
      ++mismatches;
      bad << " [" << f.label() << " n=" << f.n << " model-identifiability]";
    }
    for (const Verdict& v : cell.verdicts) {
      ++checked;
      VerdictClass want = oracle_class(f.in, f.out, f.n, v.parameter);
      if (v.cls != want) {
        ++mismatches;
        bad << " [" << f.label() << " n=" << f.n << " " << v.parameter << ": got "
            << to_string(v.cls) << ", want " << to_string(want) << "]";
        continue;
      }
      // Conjecture tagging: exactly the n >= 5 far-spoke family carries it.
      bool tagged = false;
      for (const Evidence& e : v.evidence)
        if (e.kind == "conjecture-support") tagged = true;
      bool expect_tag =
          f.in == 2 && f.out == 3 && f.n >= 5 && v.cls == VerdictClass::Unidentifiable;
      if (tagged != expect_tag) {
        ++mismatches;
        bad << " [" << f.label() << " n=" << f.n << " " << v.parameter
            << ": conjecture tag " << (tagged ? "present" : "missing") << "]";
      }
      if (f.in == 2 && f.out == 3 && f.n == 4 && v.parameter == "k14") {
        bool closed = !v.evidence.empty() && v.evidence[0].kind == "closed-form";
        if (!closed) {
          ++mismatches;
          bad << " [(2,3) n=4 k14 lacks closed-form evidence]";
        }
      }
    }
  }
  if (mismatches > 0) {
    text = std::to_string(mismatches) + " mismatches vs the proven classification:" +
           bad.str().substr(0, 600);
    return false;
  }
  text = "classification table up to n=8 matches the proven classes on all " +
         std::to_string(checked) + " parameters (26 family members), conjecture tags included";
  return true;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_identities(std::string& text) {
  Rng rng(31415);
  for (int n = 3; n <= 8; ++n) {
    LhsStructure ls = lhs_structure(n);  // throws if the split fails
    if (!(ls.g[0] == MultiPoly::constant(BigInt(1))) ||
        !ls.g[static_cast<std::size_t>(n - 1)].is_zero()) {
      text = "boundary forest sums g_0, g_{n-1} wrong at n=" + std::to_string(n);
      return false;
    }
    if (n >= 4 && !vandermonde_check(n).matches) {
      text = "structure-matrix determinant is not the Vandermonde product at n=" +
             std::to_string(n);
      return false;
    }
    Model star = make_mammillary(n, 1, 1);
    for (int t = 0; t < 20; ++t) {
      ParamPoint pt = random_rational_point(star.parameters(), rng);
      if (big_sum_residual(n, pt) != Rational(0)) {
        text = "alternating-sum identity violated at n=" + std::to_string(n);
        return false;
      }
    }
  }

  MultiPoly k12 = MultiPoly::variable(Model::edge_symbol(2, 1));
  MultiPoly k21 = MultiPoly::variable(Model::edge_symbol(1, 2));
  MultiPoly k31 = MultiPoly::variable(Model::edge_symbol(1, 3));
  for (int n = 4; n <= 8; ++n) {
    const std::size_t un = static_cast<std::size_t>(n);
    std::vector<Sym> sig = incoming_syms(n);
    auto fail = [&](const std::string& which) {
      text = which + " coefficient identity violated at n=" + std::to_string(n);
      return false;
    };

    IOEquation e12 = coeffs_forest(make_mammillary(n, 1, 2));
    if (!e12.c[0].is_zero()) return fail("hub-input c_0");
    const auto& d12 = e12.d.at(1);
    if (!d12[un - 1].is_zero()) return fail("hub-input top d");
    for (int t = 0; t <= n - 2; ++t)
      if (d12[static_cast<std::size_t>(n - 2 - t)] != k21 * elementary_symmetric(t, sig))
        return fail("hub-input d");

    IOEquation e21 = coeffs_forest(make_mammillary(n, 2, 1));
    const auto& d21 = e21.d.at(2);
    for (int t = 0; t <= n - 2; ++t)
      if (d21[static_cast<std::size_t>(n - 2 - t)] != k12 * elementary_symmetric(t, sig))
        return fail("hub-output d");

    IOEquation e22 = coeffs_forest(make_mammillary(n, 2, 2));
    const auto& d22 = e22.d.at(2);
    if (d22[un - 1] != MultiPoly::constant(BigInt(1))) return fail("same-spoke top d");
    if (d22[un - 2] != e22.c[un - 1] - k12) return fail("same-spoke first d");
    if (e22.c[un - 2] - d22[un - 3] != k12 * (d22[un - 2] - k21))
      return fail("same-spoke degree-2 difference");

    IOEquation e23 = coeffs_forest(make_mammillary(n, 2, 3));
    const auto& d23 = e23.d.at(2);
    if (!d23[un - 1].is_zero() || !d23[un - 2].is_zero()) return fail("distinct-spokes top d");
    std::vector<Sym> far = incoming_syms(n, 4);
    for (int t = 0; t <= n - 3; ++t)
      if (d23[static_cast<std::size_t>(n - 3 - t)] != k12 * k31 * elementary_symmetric(t, far))
        return fail("distinct-spokes d");
  }
  text = "forest-sum structure, Vandermonde determinant, alternating-sum identity "
         "(20 exact points per n) and all family d-identities hold for n = 3..8";
  return true;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_recovery(std::string& text) {
  int trials_done = 0;
  for (auto [i, j] : kFamilies) {
    if (i == 1 && j == 1) continue;  // nothing is recoverable there
    for (int n : {4, 5}) {
      Model rep = make_mammillary(n, i, j);
      FamilyId fam{n, i, j};
      int h_root_hits = 0, completed = 0;
      for (int trial = 0; trial < 200 && completed < 100; ++trial) {
        Rng rng = Rng(500).fork(static_cast<std::uint64_t>((i * 10 + j) * 1000 + n * 100))
                      .fork(static_cast<std::uint64_t>(trial));
        ParamPoint pt = random_distinct_rational_point(rep.parameters(), rng);
        NumericIOEq eq = det_coefficients(rep, j, pt);
        std::vector<Rational> c(eq.c.begin(), eq.c.begin() + n);
        const std::vector<Rational>& d = eq.d.at(i);
        std::vector<double> cd, dd;
        for (const Rational& v : c) cd.push_back(to_double(v));
        for (const Rational& v : d) dd.push_back(to_double(v));

        Recovery rec;
        try {
          rec = recover(fam, cd, dd);
        } catch (const InputError&) {
          continue;  // degenerate draw: resample
        }
        ++completed;
        ++trials_done;

        auto close = [&](const std::string& name, double tol) {
          double truth = to_double(pt.at(Sym::intern(name)));
          return std::abs(rec.values.at(name) - truth) <= tol * std::max(1.0, std::abs(truth));
        };
        auto mismatch = [&](const std::string& what) {
          text = "family " + fam.label() + " n=" + std::to_string(n) + " trial " +
                 std::to_string(trial) + ": " + what;
          return false;
        };

        ExactRecovery rex = recover_exact(fam, c, d);
        for (const auto& [name, value] : rex.values)
          if (value != pt.at(Sym::intern(name)))
            return mismatch("exact recovery of " + name + " is not equal");

        if (i == 1 && j == 2) {
          if (!close("k21", 1e-9)) return mismatch("k21 beyond 1e-9");
          double k12 = to_double(pt.at(Sym::intern("k12")));
          for (double cand : rec.k12_candidates)
            if (std::abs(cand - k12) <= 1e-6 * std::max(1.0, k12)) {
              ++h_root_hits;
              break;
            }
          std::vector<double> want;
          for (const Sym& s : incoming_syms(n)) want.push_back(to_double(pt.at(s)));
          std::sort(want.begin(), want.end());
          for (std::size_t t = 0; t < want.size(); ++t)
            if (std::abs(rec.incoming_multiset[t] - want[t]) > 1e-6 * std::max(1.0, want[t]))
              return mismatch("incoming multiset beyond 1e-6");
        } else if (j == 1 || j == 2) {  // (2,1) and (2,2)
          if (!close("k12", 1e-9)) return mismatch("k12 beyond 1e-9");
          if (!close("k21", 1e-6)) return mismatch("k21 beyond 1e-6");
        } else if (n == 4) {  // (2,3) smallest member
          if (!close("k14", 1e-9)) return mismatch("k14 beyond 1e-9");
        } else {  // (2,3), n = 5
          double want = to_double(pt.at(Sym::intern("k12"))) * to_double(pt.at(Sym::intern("k31")));
          if (std::abs(*rec.k12_k31_product - want) > 1e-9 * std::max(1.0, want))
            return mismatch("k12*k31 product beyond 1e-9");
        }
      }
      if (completed < 100) {
        text = "family " + fam.label() + " n=" + std::to_string(n) +
               ": only " + std::to_string(completed) + " of 100 trials completed";
        return false;
      }
      if (i == 1 && j == 2 && h_root_hits < 99) {
        text = "family (1,2) n=" + std::to_string(n) + ": true k12 found among the "
               "candidate roots only " + std::to_string(h_root_hits) + "/100 times";
        return false;
      }
    }
  }
  text = "closed-form recovery round-trips on " + std::to_string(trials_done) +
         " seeded trials (float within tolerance, exact equality where a closed form exists)";
  return true;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_witnesses(std::string& text) {
  int witnesses = 0, alternates = 0;
  for (auto [i, j] : kFamilies) {
    for (int n = family_min_n(i, j); n <= 7; ++n) {
      Model m = make_mammillary(n, i, j);
      for (const Sym& p : m.parameters()) {
        if (oracle_class(i, j, n, p.name()) != VerdictClass::Sling) continue;
        if (i == 1 && j == 2 && p.name() == "k12") continue;  // handled below
        auto w = symmetry_sling_witness(m, p);  // verifies itself exactly
        if (!w) {
          text = "no symmetry witness for " + p.name() + " in " + FamilyId{n, i, j}.label() +
                 " n=" + std::to_string(n);
          return false;
        }
        ++witnesses;
      }
    }
  }

  // Family (1,2)'s return rate k12: no automorphism moves it, so the second
  // point comes from the alternate-root construction. Every root choice must
  // produce a verified point with a distinct k12.
  Sym k12 = Sym::intern("k12");
  for (int n = 4; n <= 7; ++n) {
    Model m = make_mammillary(n, 1, 2);
    Rng rng(600 + static_cast<std::uint64_t>(n));
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 10) {
        text = "no usable base point for the alternate construction at n=" + std::to_string(n);
        return false;
      }
      ParamPointD kstar;
      for (const Sym& s : m.parameters()) kstar[s] = rng.uniform(0.5, 5.0);
      std::vector<double> k12s{kstar.at(k12)};
      bool ok = true;
      try {
        for (int choice = 0; choice <= n - 3; ++choice) {
          ParamPointD alt = alternate_point_M12(n, kstar, choice);
          k12s.push_back(alt.at(k12));
          ++alternates;
        }
      } catch (const InputError&) {
        ok = false;  // degenerate draw: resample
      }
      if (!ok) continue;
      std::sort(k12s.begin(), k12s.end());
      for (std::size_t t = 1; t < k12s.size(); ++t)
        if (k12s[t] - k12s[t - 1] < 1e-6) {
          text = "alternate k12 values collide at n=" + std::to_string(n);
          return false;
        }
      break;
    }
  }
  text = std::to_string(witnesses) + " symmetry witnesses verified exactly and " +
         std::to_string(alternates) +
         " alternate points reproduce the coefficients with a different k12 (n = 4..7)";
  return true;
}

// ---------------------------------------------------------------- criterion 7

bool criterion_jacobians(std::string& text) {
  Rng rng(777);
  int pairs = 0;
  const double h = 1e-6;
  Model leaky = parse_model(
      R"({"version":1,"n":3,"edges":[[1,2],[2,3],[3,1]],"in":[1],"out":[2],"leak":[1]})");
  for (int t = 0; t < 20; ++t) {
    Model m;
    std::unique_ptr<CoeffFn> fn;
    if (t % 5 == 4) {
      m = leaky;
      fn = make_det_coeff_fn(m);
    } else {
      auto [i, j] = kFamilies[static_cast<std::size_t>(t) % 5];
      int n = 4 + t % 3;
      m = make_mammillary(n, i, j);
      fn = make_symbolic_coeff_fn(coefficient_map(m));
    }
    const std::size_t dim = fn->symbols().size();
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c)
      x[static_cast<Eigen::Index>(c)] = rng.uniform(0.5, 3.0);
    Eigen::MatrixXd jac = fn->jacobian_d(x);
    for (std::size_t c = 0; c < dim; ++c) {
      Eigen::VectorXd hi = x, lo = x;
      hi[static_cast<Eigen::Index>(c)] += h;
      lo[static_cast<Eigen::Index>(c)] -= h;
      Eigen::VectorXd fd = (fn->values_d(hi) - fn->values_d(lo)) / (2 * h);
      for (Eigen::Index r = 0; r < jac.rows(); ++r) {
        double exact = jac(r, static_cast<Eigen::Index>(c));
        if (std::abs(fd[r] - exact) > 1e-6 * std::max(1.0, std::abs(exact))) {
          text = "Jacobian entry (" + std::to_string(r) + "," + std::to_string(c) +
                 ") off from finite differences on pair " + std::to_string(t);
          return false;
        }
      }
    }
    ++pairs;
  }

  for (auto [i, j] : kFamilies)
    for (int n = std::max(4, family_min_n(i, j)); n <= 8; ++n) {
      ModelIdentifiability mi = model_identifiability(make_mammillary(n, i, j));
      bool expect = !(i == 2 && j == 3);
      if (mi.identifiable != expect || mi.dimension != 2 * (n - 1) ||
          mi.generic_rank != (expect ? mi.dimension : mi.dimension - 1)) {
        text = "identifiability of " + FamilyId{n, i, j}.label() + " n=" + std::to_string(n) +
               " disagrees with the family characterization";
        return false;
      }
    }
  text = "exact Jacobians match central differences on " + std::to_string(pairs) +
         " (model, point) pairs; generic rank matches the family characterization for n = 4..8";
  return true;
}

// ---------------------------------------------------------------- criterion 8

bool criterion_reproducible(std::string& text) {
  int s1 = 0, s2 = 0;
  std::string a = run_cli("table --n-max 6 --seed 42 --starts 40", s1);
  std::string b = run_cli("table --n-max 6 --seed 42 --starts 40", s2);
  if (s1 != 0 || s2 != 0) {
    text = "table run exited nonzero";
    return false;
  }
  if (a.empty() || a != b) {
    text = "two identical table invocations produced different bytes";
    return false;
  }
  text = "two table runs with the same seed produced byte-identical reports (" +
         std::to_string(a.size()) + " bytes)";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int num;
    bool (*fn)(std::string&);
  };
  const Criterion all[] = {
      {1, criterion_engines},   {2, criterion_star4_oracles}, {3, criterion_table},
      {4, criterion_identities}, {5, criterion_recovery},      {6, criterion_witnesses},
      {7, criterion_jacobians}, {8, criterion_reproducible},
  };
  for (const Criterion& c : all) {
    std::string text;
    bool ok;
    try {
      ok = c.fn(text);
    } catch (const std::exception& e) {
      ok = false;
      text = std::string("unexpected exception: ") + e.what();
    }
    report(c.num, ok, text);
  }
  return failures == 0 ? 0 : 1;
}
