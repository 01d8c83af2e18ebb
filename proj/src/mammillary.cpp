#include "lcm/mammillary.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "lcm/errors.hpp"
#include "lcm/forests.hpp"
#include "lcm/ioeq.hpp"
#include "lcm/parallel.hpp"
#include "lcm/rng.hpp"
#include "lcm/unipoly.hpp"

namespace lcm {

std::string FamilyId::label() const {
  return "(" + std::to_string(in) + "," + std::to_string(out) + ")";
}

bool family_pair_valid(int in, int out) {
  if (in == 1) return out == 1 || out == 2;
  if (in == 2) return out == 1 || out == 2 || out == 3;
  return false;
}

int family_min_n(int in, int out) { return (in == 1 && out == 1) ? 3 : 4; }

namespace {

void require_family(const FamilyId& f) {
  if (!family_pair_valid(f.in, f.out)) throw InputError("unknown star family " + f.label());
  if (f.n < family_min_n(f.in, f.out))
    throw InputError("family " + f.label() + " needs n >= " +
                     std::to_string(family_min_n(f.in, f.out)));
}

std::string pname(int from, int to) { return Model::edge_symbol(from, to).name(); }

MultiPoly forest_sum(const std::vector<Forest>& forests) {
  MultiPoly total;
  for (const Forest& f : forests) {
    MultiPoly prod = MultiPoly::constant(1);
    for (const Edge& e : f.edges)
      prod = prod * MultiPoly::variable(Model::edge_symbol(e.from, e.to));
    total = total + prod;
  }
  return total;
}

Rational rpow(const Rational& x, int e) {
  Rational out = 1;
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

// e_0..e_kmax of the given values, by the usual one-pass recurrence.
template <typename T>
std::vector<T> esp_values(const std::vector<T>& xs, int kmax) {
  std::vector<T> e(static_cast<std::size_t>(kmax) + 1, T(0));
  e[0] = 1;
  int seen = 0;
  for (const T& x : xs) {
    ++seen;
    for (int j = std::min(kmax, seen); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

Rational point_value(const ParamPoint& p, Sym s) {
  auto it = p.find(s);
  if (it == p.end()) throw InputError("point misses parameter " + s.name());
  return it->second;
}

}  // namespace

Model make_mammillary(int n, int in_comp, int out_comp) {
  if (n < 3) throw InputError("star families need n >= 3");
  if (in_comp < 1 || in_comp > n || out_comp < 1 || out_comp > n)
    throw InputError("input/output compartment out of range");
  Model m;
  m.n = n;
  for (int p = 2; p <= n; ++p) {
    m.edges.push_back({1, p});
    m.edges.push_back({p, 1});
  }
  std::sort(m.edges.begin(), m.edges.end());
  m.inputs = {in_comp};
  m.outputs = {out_comp};
  return m;
}

std::optional<std::pair<FamilyId, Permutation>> detect_mammillary(const Model& m) {
  if (m.n < 3 || !m.leaks.empty() || m.inputs.size() != 1 || m.outputs.size() != 1)
    return std::nullopt;
  if (static_cast<int>(m.edges.size()) != 2 * (m.n - 1)) return std::nullopt;
  int center = 0;
  for (int c = 1; c <= m.n && center == 0; ++c) {
    bool ok = true;
    for (int v = 1; v <= m.n && ok; ++v)
      if (v != c) ok = m.has_edge(c, v) && m.has_edge(v, c);
    if (ok) center = c;
  }
  if (center == 0) return std::nullopt;

  const int i0 = m.inputs[0], j0 = m.outputs[0];
  FamilyId fam;
  fam.n = m.n;
  Permutation sigma;
  sigma.image.assign(static_cast<std::size_t>(m.n) + 1, 0);
  sigma.image[static_cast<std::size_t>(center)] = 1;
  if (i0 == center && j0 == center) {
    fam.in = fam.out = 1;
  } else if (i0 == center) {
    fam.in = 1;
    fam.out = 2;
    sigma.image[static_cast<std::size_t>(j0)] = 2;
  } else if (j0 == center) {
    fam.in = 2;
    fam.out = 1;
    sigma.image[static_cast<std::size_t>(i0)] = 2;
  } else if (i0 == j0) {
    fam.in = fam.out = 2;
    sigma.image[static_cast<std::size_t>(i0)] = 2;
  } else {
    fam.in = 2;
    fam.out = 3;
    sigma.image[static_cast<std::size_t>(i0)] = 2;
    sigma.image[static_cast<std::size_t>(j0)] = 3;
  }
  std::vector<bool> used(static_cast<std::size_t>(m.n) + 1, false);
  for (int v = 1; v <= m.n; ++v)
    if (int w = sigma.image[static_cast<std::size_t>(v)]) used[static_cast<std::size_t>(w)] = true;
  int next = 1;
  for (int v = 1; v <= m.n; ++v) {
    if (sigma.image[static_cast<std::size_t>(v)]) continue;
    while (used[static_cast<std::size_t>(next)]) ++next;
    sigma.image[static_cast<std::size_t>(v)] = next;
    used[static_cast<std::size_t>(next)] = true;
  }
  return std::make_pair(fam, sigma);
}

LhsStructure lhs_structure(int n) {
  if (n < 3) throw InputError("lhs structure needs n >= 3");
  LhsStructure out;
  out.n = n;
  for (int j = 3; j <= n; ++j) out.sigma.push_back(Model::edge_symbol(j, 1));

  std::vector<Edge> tilde;  // the star with both edges between 1 and 2 removed
  for (int j = 3; j <= n; ++j) {
    tilde.push_back({1, j});
    tilde.push_back({j, 1});
  }
  out.g.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.g.push_back(forest_sum(spanning_incoming_forests(n, tilde, i)));

  const int s = n - 2;
  out.M.assign(static_cast<std::size_t>(s), std::vector<MultiPoly>(static_cast<std::size_t>(s)));
  for (int a = 0; a < s; ++a)
    for (int c = 0; c < s; ++c) {
      std::vector<Sym> subset;
      for (int t = 0; t < s; ++t)
        if (t != c) subset.push_back(out.sigma[static_cast<std::size_t>(t)]);
      out.M[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] =
          elementary_symmetric(a, subset);
    }

  if (out.g[0] != MultiPoly::constant(1) || !out.g[static_cast<std::size_t>(n) - 1].is_zero())
    throw InternalError("lhs structure: boundary g values are off");
  // g_r = e_r(Sigma) + sum_c M[r-1][c] * k_{c+3,1}.
  for (int a = 0; a < s; ++a) {
    MultiPoly rhs = elementary_symmetric(a + 1, out.sigma);
    for (int c = 0; c < s; ++c)
      rhs = rhs + out.M[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] *
                      MultiPoly::variable(Model::edge_symbol(1, c + 3));
    if (out.g[static_cast<std::size_t>(a) + 1] != rhs)
      throw InternalError("lhs structure: linear split of g failed");
  }
  // c_{n-1-t} = k21 e_t(Sigma) + k12 g_t + g_{t+1}.
  IOEquation eq = coeffs_forest(make_mammillary(n, 1, 2));
  MultiPoly k12 = MultiPoly::variable(Model::edge_symbol(2, 1));
  MultiPoly k21 = MultiPoly::variable(Model::edge_symbol(1, 2));
  for (int t = 0; t <= n - 2; ++t) {
    MultiPoly rhs = k21 * elementary_symmetric(t, out.sigma) +
                    k12 * out.g[static_cast<std::size_t>(t)] + out.g[static_cast<std::size_t>(t) + 1];
    if (eq.c[static_cast<std::size_t>(n - 1 - t)] != rhs)
      throw InternalError("lhs structure: coefficient identity failed");
  }
  return out;
}

namespace {

MultiPoly det_poly(std::vector<std::vector<MultiPoly>> m) {
  // Laplace expansion along the first row; matrices here stay tiny.
  const std::size_t s = m.size();
  if (s == 0) return MultiPoly::constant(1);
  if (s == 1) return m[0][0];
  MultiPoly total;
  for (std::size_t c = 0; c < s; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<MultiPoly>> minor;
    minor.reserve(s - 1);
    for (std::size_t r = 1; r < s; ++r) {
      std::vector<MultiPoly> row;
      row.reserve(s - 1);
      for (std::size_t c2 = 0; c2 < s; ++c2)
        if (c2 != c) row.push_back(m[r][c2]);
      minor.push_back(std::move(row));
    }
    MultiPoly term = m[0][c] * det_poly(std::move(minor));
    total = (c % 2 == 0) ? total + term : total - term;
  }
  return total;
}

}  // namespace

VandermondeCheck vandermonde_check(int n) {
  LhsStructure s = lhs_structure(n);
  MultiPoly det = det_poly(s.M);
  MultiPoly rhs = MultiPoly::constant(1);
  for (int j = 3; j <= n; ++j)
    for (int l = j + 1; l <= n; ++l)
      rhs = rhs * (MultiPoly::variable(Model::edge_symbol(j, 1)) -
                   MultiPoly::variable(Model::edge_symbol(l, 1)));
  if (det == rhs) return {true, 1};
  if (det == -rhs) return {true, -1};
  return {false, 0};
}

Rational big_sum_residual(int n, const ParamPoint& point) {
  if (n < 3) throw InputError("alternating-sum identity needs n >= 3");
  IOEquation eq = coeffs_forest(make_mammillary(n, 1, 2));
  Rational k12v = point_value(point, Model::edge_symbol(2, 1));
  Rational k21v = point_value(point, Model::edge_symbol(1, 2));
  std::vector<Rational> sig;
  for (int j = 3; j <= n; ++j) sig.push_back(point_value(point, Model::edge_symbol(j, 1)));
  std::vector<Rational> e = esp_values(sig, n - 2);
  Rational lhs = 0, alt = 0;
  for (int t = 0; t <= n - 2; ++t) {
    Rational w = rpow(k12v, n - 2 - t);
    if (t % 2) w = -w;
    lhs += w * eq.c[static_cast<std::size_t>(n - 1 - t)].evaluate(point);
    alt += w * e[static_cast<std::size_t>(t)];
  }
  return lhs - (alt * k21v + rpow(k12v, n - 1));
}

namespace {

// z^{n-1} + sum_{i=2}^n (-1)^i (d_{n-i} - c_{n-i+1}) z^{n-i}: the monic
// polynomial whose roots are k12 and the negated nonzero spectrum of the
// reduced star, assembled from coefficient values alone (family (1,2)).
std::vector<double> h_from_values(int n, const std::vector<double>& c,
                                  const std::vector<double>& d) {
  std::vector<double> hc(static_cast<std::size_t>(n), 0.0);
  hc[static_cast<std::size_t>(n) - 1] = 1.0;
  for (int i = 2; i <= n; ++i) {
    double v = d[static_cast<std::size_t>(n - i)] - c[static_cast<std::size_t>(n - i + 1)];
    hc[static_cast<std::size_t>(n - i)] = (i % 2 == 0) ? v : -v;
  }
  return hc;
}

// e_t = d_{n-2-t} / d_{n-2} for t = 0..n-2.
std::vector<double> e_from_d(int n, const std::vector<double>& d, double pivot) {
  std::vector<double> e(static_cast<std::size_t>(n) - 1);
  for (int t = 0; t <= n - 2; ++t) e[static_cast<std::size_t>(t)] = d[static_cast<std::size_t>(n - 2 - t)] / pivot;
  return e;
}

std::vector<double> multiset_or_throw(const std::vector<double>& e_tail) {
  auto ms = recover_multiset(e_tail);
  if (!ms) throw InputError("incoming-rate multiset recovery left the reals");
  return *ms;
}

}  // namespace

Recovery recover(const FamilyId& family, const std::vector<double>& c,
                 const std::vector<double>& d) {
  require_family(family);
  const int n = family.n;
  if (static_cast<int>(c.size()) != n || static_cast<int>(d.size()) != n)
    throw InputError("coefficient lists must have n entries each");
  Recovery out;
  out.family = family;

  if (family.in == 1 && family.out == 1) {
    out.notes.push_back("no single parameter of this family is identifiable");
    return out;
  }
  if (family.in == 1 && family.out == 2) {
    double k21 = d[static_cast<std::size_t>(n) - 2];
    if (std::abs(k21) < 1e-12)
      throw InputError("degenerate input: top d coefficient vanishes");
    out.values[pname(1, 2)] = k21;
    out.k12_candidates = real_roots(h_from_values(n, c, d));
    std::vector<double> e = e_from_d(n, d, k21);
    out.incoming_multiset = multiset_or_throw({e.begin() + 1, e.end()});
    out.notes.push_back(
        "k12 lies among the listed real roots; incoming rates identifiable as a multiset only");
    return out;
  }
  if (family.in == 2 && family.out == 1) {
    double k12 = d[static_cast<std::size_t>(n) - 2];
    if (std::abs(k12) < 1e-12)
      throw InputError("degenerate input: top d coefficient vanishes");
    out.values[pname(2, 1)] = k12;
    std::vector<double> e = e_from_d(n, d, k12);
    double num = 0, denom = 0;
    for (int t = 0; t <= n - 2; ++t) {
      double w = std::pow(k12, n - 2 - t);
      if (t % 2) w = -w;
      num += w * c[static_cast<std::size_t>(n - 1 - t)];
      denom += w * e[static_cast<std::size_t>(t)];
    }
    num -= std::pow(k12, n - 1);
    double scale = std::pow(std::max(1.0, std::abs(k12)), n - 2);
    if (std::abs(denom) < 1e-6 * scale)
      throw InputError("degenerate input: alternating-sum denominator near zero");
    out.values[pname(1, 2)] = num / denom;
    out.incoming_multiset = multiset_or_throw({e.begin() + 1, e.end()});
    return out;
  }
  if (family.in == 2 && family.out == 2) {
    double k12 = c[static_cast<std::size_t>(n) - 1] - d[static_cast<std::size_t>(n) - 2];
    if (std::abs(k12) < 1e-9 * std::max(1.0, std::abs(c[static_cast<std::size_t>(n) - 1])))
      throw InputError("degenerate input: leading c and d nearly equal");
    double k21 = d[static_cast<std::size_t>(n) - 2] -
                 (c[static_cast<std::size_t>(n) - 2] - d[static_cast<std::size_t>(n) - 3]) / k12;
    out.values[pname(2, 1)] = k12;
    out.values[pname(1, 2)] = k21;
    return out;
  }
  // family (2,3)
  double pivot = d[static_cast<std::size_t>(n) - 3];
  if (std::abs(pivot) < 1e-12)
    throw InputError("degenerate input: product coefficient vanishes");
  out.k12_k31_product = pivot;
  if (n == 4) {
    out.values[pname(4, 1)] = d[0] / d[1];
    out.notes.push_back("remaining parameters have no closed form");
    return out;
  }
  std::vector<double> e(static_cast<std::size_t>(n) - 2);
  e[0] = 1;
  for (int t = 1; t <= n - 3; ++t)
    e[static_cast<std::size_t>(t)] = d[static_cast<std::size_t>(n - 3 - t)] / pivot;
  out.incoming_multiset = multiset_or_throw({e.begin() + 1, e.end()});
  out.notes.push_back(
      "only the product k12*k31 and the multiset {k14..k1n} are identifiable combinations");
  return out;
}

ExactRecovery recover_exact(const FamilyId& family, const std::vector<Rational>& c,
                            const std::vector<Rational>& d) {
  require_family(family);
  const int n = family.n;
  if (static_cast<int>(c.size()) != n || static_cast<int>(d.size()) != n)
    throw InputError("coefficient lists must have n entries each");
  ExactRecovery out;
  out.family = family;

  if (family.in == 1 && family.out == 1) {
    out.notes.push_back("no single parameter of this family is identifiable");
    return out;
  }
  if (family.in == 1 && family.out == 2) {
    if (d[static_cast<std::size_t>(n) - 2] == 0)
      throw InputError("degenerate input: top d coefficient vanishes");
    out.values[pname(1, 2)] = d[static_cast<std::size_t>(n) - 2];
    out.notes.push_back("k12 candidates and the incoming multiset need the numeric path");
    return out;
  }
  if (family.in == 2 && family.out == 1) {
    Rational k12 = d[static_cast<std::size_t>(n) - 2];
    if (k12 == 0) throw InputError("degenerate input: top d coefficient vanishes");
    out.values[pname(2, 1)] = k12;
    Rational num = 0, denom = 0;
    for (int t = 0; t <= n - 2; ++t) {
      Rational w = rpow(k12, n - 2 - t);
      if (t % 2) w = -w;
      num += w * c[static_cast<std::size_t>(n - 1 - t)];
      denom += w * d[static_cast<std::size_t>(n - 2 - t)] / k12;
    }
    num -= rpow(k12, n - 1);
    if (denom == 0)
      throw InputError("degenerate input: alternating-sum denominator vanishes");
    out.values[pname(1, 2)] = num / denom;
    return out;
  }
  if (family.in == 2 && family.out == 2) {
    Rational k12 = c[static_cast<std::size_t>(n) - 1] - d[static_cast<std::size_t>(n) - 2];
    if (k12 == 0) throw InputError("degenerate input: leading c and d equal");
    Rational k21 = d[static_cast<std::size_t>(n) - 2] -
                   (c[static_cast<std::size_t>(n) - 2] - d[static_cast<std::size_t>(n) - 3]) / k12;
    out.values[pname(2, 1)] = k12;
    out.values[pname(1, 2)] = k21;
    return out;
  }
  // family (2,3)
  if (d[static_cast<std::size_t>(n) - 3] == 0)
    throw InputError("degenerate input: product coefficient vanishes");
  out.k12_k31_product = d[static_cast<std::size_t>(n) - 3];
  if (n == 4) out.values[pname(4, 1)] = d[0] / d[1];
  return out;
}

ParamPointD alternate_point_M12(int n, const ParamPointD& kstar, int root_choice) {
  if (n < 3) throw InputError("alternate point construction needs n >= 3");
  if (root_choice < 0 || root_choice > n - 3)
    throw InputError("root_choice out of range: only n - 2 alternate roots exist");
  auto val = [&](Sym s) {
    auto it = kstar.find(s);
    if (it == kstar.end()) throw InputError("point misses parameter " + s.name());
    return it->second;
  };
  const double k12v = val(Model::edge_symbol(2, 1));
  const double k21v = val(Model::edge_symbol(1, 2));
  std::vector<double> sv;
  for (int j = 3; j <= n; ++j) sv.push_back(val(Model::edge_symbol(j, 1)));
  {
    std::vector<double> sorted = sv;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] - sorted[i - 1] <= 1e-9 * std::max(1.0, std::abs(sorted[i])))
        throw InputError("incoming rates must be pairwise distinct");
  }

  IOEquation eq = coeffs_forest(make_mammillary(n, 1, 2));
  std::vector<double> cvals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    cvals[static_cast<std::size_t>(i)] = eq.c[static_cast<std::size_t>(i)].evaluate_double(kstar);
  std::vector<double> e = esp_values(sv, n - 2);

  // Roots of z^{n-1} + sum_i (-1)^i (k21 e_{i-2} - c_{n-i+1}) z^{n-i}: k12
  // together with the negated nonzero spectrum of the reduced star.
  std::vector<double> hc(static_cast<std::size_t>(n), 0.0);
  hc[static_cast<std::size_t>(n) - 1] = 1.0;
  for (int i = 2; i <= n; ++i) {
    double v = k21v * e[static_cast<std::size_t>(i) - 2] - cvals[static_cast<std::size_t>(n - i + 1)];
    hc[static_cast<std::size_t>(n - i)] = (i % 2 == 0) ? v : -v;
  }
  std::vector<double> roots = real_roots(hc);
  if (static_cast<int>(roots.size()) != n - 1)
    throw InputError("companion polynomial has non-real roots; point outside the construction regime");
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (roots[i] - roots[i - 1] <= 1e-7 * std::max(1.0, std::abs(roots[i])))
      throw InputError("companion polynomial has repeated roots");

  std::size_t self = 0;
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (std::abs(roots[i] - k12v) < std::abs(roots[self] - k12v)) self = i;
  std::vector<double> candidates;
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (i != self) candidates.push_back(roots[i]);
  std::sort(candidates.begin(), candidates.end(), std::greater<>());
  const double k12n = candidates[static_cast<std::size_t>(root_choice)];

  const int s = n - 2;
  Eigen::MatrixXd Mstar(s, s);
  for (int a = 0; a < s; ++a)
    for (int c = 0; c < s; ++c) {
      std::vector<double> subset;
      for (int t = 0; t < s; ++t)
        if (t != c) subset.push_back(sv[static_cast<std::size_t>(t)]);
      Mstar(a, c) = esp_values(subset, a)[static_cast<std::size_t>(a)];
    }
  Eigen::MatrixXd Mt = Mstar;  // M* plus the new k12 times the row-shifted M*
  for (int a = 1; a < s; ++a)
    for (int c = 0; c < s; ++c) Mt(a, c) += k12n * Mstar(a - 1, c);
  Eigen::VectorXd rhs(s);
  for (int a = 0; a < s; ++a) {
    const int r = a + 1;
    rhs(a) = cvals[static_cast<std::size_t>(n - r)] - k21v * e[static_cast<std::size_t>(r) - 1] -
             k12n * e[static_cast<std::size_t>(r) - 1] - e[static_cast<std::size_t>(r)];
  }
  Eigen::VectorXd w = Mt.colPivHouseholderQr().solve(rhs);
  if (!w.allFinite() || (Mt * w - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
    throw InputError("shifted linear system is ill-conditioned at this point");

  ParamPointD out = kstar;
  out[Model::edge_symbol(2, 1)] = k12n;
  for (int j = 3; j <= n; ++j) out[Model::edge_symbol(1, j)] = w(j - 3);

  double scale = 1.0, err = 0.0;
  auto compare = [&](const MultiPoly& p) {
    double a = p.evaluate_double(kstar), b = p.evaluate_double(out);
    scale = std::max(scale, std::abs(a));
    err = std::max(err, std::abs(a - b));
  };
  for (const MultiPoly& p : eq.c) compare(p);
  for (const auto& [input, ds] : eq.d)
    for (const MultiPoly& p : ds) compare(p);
  if (err > 1e-9 * scale)
    throw InternalError("alternate point failed to reproduce the coefficients");
  return out;
}

ClosedFormRegistry closed_form_registry(const FamilyId& family) {
  require_family(family);
  ClosedFormRegistry reg;
  const int n = family.n;
  auto dN = [](int i) { return "d" + std::to_string(i); };
  auto cN = [](int i) { return "c" + std::to_string(i); };
  using VC = VerdictClass;

  if (family.in == 1 && family.out == 2) {
    reg.closed_forms[pname(1, 2)] = {VC::GloballyIdentifiable, pname(1, 2) + " = " + dN(n - 2)};
  } else if (family.in == 2 && family.out == 1) {
    reg.closed_forms[pname(2, 1)] = {VC::GloballyIdentifiable, pname(2, 1) + " = " + dN(n - 2)};
    reg.closed_forms[pname(1, 2)] = {
        VC::GenericallyGloballyIdentifiable,
        pname(1, 2) + " = (sum_t (-1)^t " + pname(2, 1) + "^(n-2-t) c_{n-1-t} - " + pname(2, 1) +
            "^(n-1)) / prod_j (" + pname(2, 1) + " - k1j), e_t read off the d side"};
  } else if (family.in == 2 && family.out == 2) {
    reg.closed_forms[pname(2, 1)] = {VC::GloballyIdentifiable,
                                     pname(2, 1) + " = " + cN(n - 1) + " - " + dN(n - 2)};
    reg.closed_forms[pname(1, 2)] = {
        VC::GenericallyGloballyIdentifiable,
        pname(1, 2) + " = " + dN(n - 2) + " - (" + cN(n - 2) + " - " + dN(n - 3) + ")/" + pname(2, 1)};
  } else if (family.in == 2 && family.out == 3) {
    if (n == 4) {
      reg.closed_forms[pname(4, 1)] = {VC::GenericallyGloballyIdentifiable,
                                       pname(4, 1) + " = d0/d1"};
    } else {
      reg.conjecture_unidentifiable = {pname(2, 1), pname(1, 2), pname(3, 1), pname(1, 3)};
      for (int j = 4; j <= n; ++j) reg.conjecture_unidentifiable.insert(pname(1, j));
    }
  }
  return reg;
}

namespace {

std::string relabel_param_name(const std::string& name, const Permutation& rho) {
  bool bad = name.size() < 3 || name[0] != 'k';
  int to = 0, from = 0;
  if (!bad) {
    const std::string rest = name.substr(1);
    const std::size_t us = rest.find('_');
    try {
      if (us != std::string::npos) {
        to = std::stoi(rest.substr(0, us));
        from = std::stoi(rest.substr(us + 1));
      } else if (rest.size() == 2) {
        to = rest[0] - '0';
        from = rest[1] - '0';
      } else {
        bad = true;
      }
    } catch (const std::exception&) {
      bad = true;
    }
  }
  if (bad || from < 1 || from > rho.n() || to < 0 || to > rho.n())
    throw InputError("unrecognized parameter name: " + name);
  if (to == 0) return Model::leak_symbol(rho.to(from)).name();
  return Model::edge_symbol(rho.to(from), rho.to(to)).name();
}

}  // namespace

ClosedFormRegistry relabel_registry(const ClosedFormRegistry& reg, const Permutation& rho) {
  ClosedFormRegistry out;
  for (const auto& [name, entry] : reg.closed_forms)
    out.closed_forms[relabel_param_name(name, rho)] = entry;
  for (const std::string& name : reg.conjecture_unidentifiable)
    out.conjecture_unidentifiable.insert(relabel_param_name(name, rho));
  return out;
}

ClassificationTable classification_table(int n_max, const ClassifyConfig& cfg) {
  if (n_max < 5) throw InputError("classification table needs n_max >= 5");
  ClassificationTable table;
  table.n_max = n_max;
  table.seed = cfg.seed;
  table.points = cfg.points;
  table.starts = cfg.starts;
  table.fiber_base_points = cfg.fiber_base_points;

  static constexpr std::pair<int, int> kFamilies[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 3}};
  struct Job {
    int fi;
    int n;
  };
  std::vector<Job> jobs;
  for (int fi = 0; fi < 5; ++fi)
    for (int n = family_min_n(kFamilies[fi].first, kFamilies[fi].second); n <= n_max; ++n)
      jobs.push_back({fi, n});

  std::vector<TableCell> cells(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t idx) {
    const Job& job = jobs[idx];
    FamilyId fam{job.n, kFamilies[job.fi].first, kFamilies[job.fi].second};
    ClosedFormRegistry reg = closed_form_registry(fam);
    ClassifyConfig cell_cfg = cfg;
    cell_cfg.registry = &reg;
    // Per-cell seed derived from (family, n): results independent of cell order.
    cell_cfg.seed = Rng(cfg.seed)
                        .fork(static_cast<std::uint64_t>(job.fi) * 64 +
                              static_cast<std::uint64_t>(job.n))
                        .next();
    Analyzer az(make_mammillary(job.n, fam.in, fam.out), cell_cfg);
    TableCell cell;
    cell.family = fam;
    cell.model_ident = az.identifiability();
    cell.verdicts = az.classify_all();
    cells[idx] = std::move(cell);
  });
  table.cells = std::move(cells);
  return table;
}

ConjectureProbe conjecture_probe_M23(int n, int points, std::uint64_t seed) {
  if (n < 4) throw InputError("family (2,3) needs n >= 4");
  Model m = make_mammillary(n, 2, 3);
  ClassifyConfig cfg;
  cfg.points = points;
  cfg.seed = seed;
  Analyzer az(m, cfg);
  ConjectureProbe probe;
  probe.n = n;
  ModelIdentifiability mi = az.identifiability();
  probe.generic_rank = mi.generic_rank;
  probe.dimension = mi.dimension;
  for (Sym p : m.parameters())
    (az.locally_identifiable(p) ? probe.locally_identifiable : probe.rank_deficient)
        .push_back(p.name());
  IOEquation eq = coeffs_forest(m);
  const auto& dd = eq.d.at(2);
  probe.d_top_zero = dd[static_cast<std::size_t>(n) - 2].is_zero();
  MultiPoly prod = MultiPoly::variable(Model::edge_symbol(2, 1)) *
                   MultiPoly::variable(Model::edge_symbol(1, 3));
  probe.d_product_match = dd[static_cast<std::size_t>(n) - 3] == prod;
  return probe;
}

}  // namespace lcm
