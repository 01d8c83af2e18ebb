#include "lcm/ioeq.hpp"

#include <algorithm>
#include <set>

#include "lcm/errors.hpp"
#include "lcm/forests.hpp"
#include "lcm/unipoly.hpp"

namespace lcm {

namespace {

MultiPoly forest_sum(int n, const std::vector<Edge>& edges, int ell,
                     std::optional<std::pair<int, int>> connect) {
  MultiPoly total;
  for (const Forest& f : spanning_incoming_forests(n, edges, ell, connect)) {
    MultiPoly term = MultiPoly::constant(1);
    for (const Edge& e : f.edges)
      term = term * MultiPoly::variable(Model::edge_symbol(e.from, e.to));
    total = total + term;
  }
  return total;
}

}  // namespace

IOEquation coeffs_forest(const Model& m) {
  ValidationReport v = validate(m);
  if (!v.forest_formula_applicable) {
    std::string why;
    if (!v.strongly_connected) why = "model is not strongly connected";
    else if (v.num_leaks != 0) why = "model has leaks";
    else why = "model must have exactly one input and one output";
    throw InputError("forest method inapplicable: " + why);
  }
  int j = m.inputs.front();
  int i = m.outputs.front();

  IOEquation eq;
  eq.n = m.n;
  eq.output = i;
  for (int k = 0; k < m.n; ++k) eq.c.push_back(forest_sum(m.n, m.edges, m.n - k, std::nullopt));

  Model reduced = reduced_graph(m, i);
  std::vector<MultiPoly> d;
  for (int k = 0; k < m.n; ++k)
    d.push_back(forest_sum(m.n, reduced.edges, m.n - k - 1, std::make_pair(j, i)));
  eq.d.emplace(j, std::move(d));

  // Structural sanity: no n-edge incoming forest exists, so c_0 = 0; the
  // (n-1)-derivative input coefficient is 0 for distinct input/output and 1
  // when they coincide (empty forest).
  if (!eq.c[0].is_zero()) throw InternalError("coeffs_forest: c_0 != 0");
  const MultiPoly& dtop = eq.d.at(j)[static_cast<std::size_t>(m.n - 1)];
  if (j != i && !dtop.is_zero()) throw InternalError("coeffs_forest: d_{n-1} != 0 for in != out");
  if (j == i && dtop != MultiPoly::constant(1))
    throw InternalError("coeffs_forest: d_{n-1} != 1 for in = out");
  return eq;
}

namespace {

// Exact values of A at the point, 1-based model indices to 0-based matrix.
QMat eval_matrix(const SymbolicMatrix& a, const ParamPoint& point) {
  QMat out(static_cast<std::size_t>(a.n), std::vector<Rational>(static_cast<std::size_t>(a.n)));
  for (int i = 1; i <= a.n; ++i)
    for (int j = 1; j <= a.n; ++j)
      out[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
          a.at(i, j).evaluate(point);
  return out;
}

QMat s_minus(const QMat& a, const Rational& s) {
  QMat b = a;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      b[i][j] = -b[i][j];
      if (i == j) b[i][j] += s;
    }
  return b;
}

QMat drop_row_col(const QMat& a, std::size_t row, std::size_t col) {
  QMat b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == row) continue;
    std::vector<Rational> r;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != col) r.push_back(a[i][j]);
    b.push_back(std::move(r));
  }
  return b;
}

}  // namespace

NumericIOEq det_coefficients(const Model& m, int output, const ParamPoint& point) {
  if (!std::binary_search(m.outputs.begin(), m.outputs.end(), output))
    throw InputError("det_coefficients: vertex " + std::to_string(output) + " is not an output");
  if (m.inputs.empty()) throw InputError("det_coefficients: model has no inputs");

  QMat a = eval_matrix(compartmental_matrix(m), point);
  int n = m.n;

  NumericIOEq out;
  out.n = n;
  out.output = output;

  // det(sI - A) sampled at s = 0..n, then interpolated: degree n, monic.
  std::vector<std::pair<Rational, Rational>> samples;
  for (int t = 0; t <= n; ++t)
    samples.emplace_back(Rational(t), det_exact(s_minus(a, Rational(t))));
  UniPoly charpoly = interpolate_univariate(samples);
  if (charpoly.degree() != n || charpoly.coeff[static_cast<std::size_t>(n)] != 1)
    throw InternalError("det_coefficients: det(sI - A) is not monic of degree n");
  out.c.assign(charpoly.coeff.begin(), charpoly.coeff.end());

  for (int j : m.inputs) {
    // Minor removes the input row and output column; degree <= n-1 needs n
    // sample points. Sign (-1)^{i+j} from the cofactor expansion.
    int sign = ((output + j) % 2 == 0) ? 1 : -1;
    std::vector<std::pair<Rational, Rational>> ms;
    for (int t = 0; t < n; ++t) {
      QMat minor = drop_row_col(s_minus(a, Rational(t)), static_cast<std::size_t>(j - 1),
                                static_cast<std::size_t>(output - 1));
      ms.emplace_back(Rational(t), Rational(sign) * det_exact(minor));
    }
    UniPoly dpoly = interpolate_univariate(ms);
    std::vector<Rational> d(static_cast<std::size_t>(n), Rational(0));
    for (std::size_t k = 0; k < dpoly.coeff.size(); ++k) d[k] = dpoly.coeff[k];
    out.d.emplace(j, std::move(d));
  }
  return out;
}

NumericIOEqD det_coefficients_d(const Model& m, int output,
                                const std::map<Sym, double>& point) {
  if (!std::binary_search(m.outputs.begin(), m.outputs.end(), output))
    throw InputError("det_coefficients_d: vertex " + std::to_string(output) +
                     " is not an output");
  if (m.inputs.empty()) throw InputError("det_coefficients_d: model has no inputs");
  int n = m.n;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : m.edges) {
    double v = point.at(Model::edge_symbol(e.from, e.to));
    a(e.to - 1, e.from - 1) += v;
    a(e.from - 1, e.from - 1) -= v;
  }
  for (int j : m.leaks) a(j - 1, j - 1) -= point.at(Model::leak_symbol(j));

  auto interp = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    // Lagrange in double; node count <= 9, fine for these magnitudes.
    std::size_t k = xs.size();
    std::vector<double> acc(k, 0.0), basis;
    for (std::size_t i = 0; i < k; ++i) {
      basis.assign(1, 1.0);
      double denom = 1.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i) continue;
        basis.push_back(0.0);
        for (std::size_t t = basis.size() - 1; t >= 1; --t)
          basis[t] = basis[t - 1] - xs[j] * basis[t];
        basis[0] = -xs[j] * basis[0];
        denom *= xs[i] - xs[j];
      }
      for (std::size_t t = 0; t < basis.size(); ++t) acc[t] += ys[i] / denom * basis[t];
    }
    return acc;
  };

  NumericIOEqD out;
  out.n = n;
  out.output = output;
  {
    std::vector<double> xs, ys;
    for (int t = 0; t <= n; ++t) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) * t - a;
      xs.push_back(t);
      ys.push_back(b.partialPivLu().determinant());
    }
    out.c = interp(xs, ys);
  }
  for (int j : m.inputs) {
    int sign = ((output + j) % 2 == 0) ? 1 : -1;
    std::vector<double> xs, ys;
    for (int t = 0; t < n; ++t) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) * t - a;
      Eigen::MatrixXd minor(n - 1, n - 1);
      int ri = 0;
      for (int r = 0; r < n; ++r) {
        if (r == j - 1) continue;
        int ci = 0;
        for (int cc = 0; cc < n; ++cc) {
          if (cc == output - 1) continue;
          minor(ri, ci++) = b(r, cc);
        }
        ++ri;
      }
      xs.push_back(t);
      double dv = (n == 1) ? 1.0 : minor.partialPivLu().determinant();
      ys.push_back(sign * dv);
    }
    std::vector<double> d = interp(xs, ys);
    d.resize(static_cast<std::size_t>(n), 0.0);
    out.d.emplace(j, std::move(d));
  }
  return out;
}

Method parse_method(const std::string& name) {
  if (name == "forest") return Method::Forest;
  if (name == "det") return Method::Det;
  if (name == "both") return Method::Both;
  throw InputError("unknown method '" + name + "' (expected forest, det or both)");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::Forest: return "forest";
    case Method::Det: return "det";
    case Method::Both: return "both";
  }
  throw InternalError("unreachable method");
}

namespace {

std::string entry_name(const Model& m, int output, char kind, int input, int k) {
  std::string name;
  if (m.outputs.size() > 1) name += "y" + std::to_string(output) + ".";
  if (kind == 'd' && m.inputs.size() > 1) name += "u" + std::to_string(input) + ".";
  name += kind;
  name += std::to_string(k);
  return name;
}

}  // namespace

CoefficientMap coefficient_map(const Model& m, Method method) {
  if (method == Method::Det)
    throw InputError(
        "coefficient_map: the det method is evaluation-only and has no symbolic map; "
        "use the forest method or the det-backed evaluation path");
  CoefficientMap cm;
  cm.n = m.n;
  cm.symbols = m.parameters();

  IOEquation eq = coeffs_forest(m);  // throws InputError outside the regime
  int input = m.inputs.front();
  for (int k = m.n - 1; k >= 0; --k) {
    const MultiPoly& p = eq.c[static_cast<std::size_t>(k)];
    std::string name = entry_name(m, eq.output, 'c', input, k);
    if (p.is_constant())
      cm.dropped.emplace_back(name, Rational(p.constant_value()));
    else
      cm.entries.push_back({name, p});
  }
  for (int k = m.n - 1; k >= 0; --k) {
    const MultiPoly& p = eq.d.at(input)[static_cast<std::size_t>(k)];
    std::string name = entry_name(m, eq.output, 'd', input, k);
    if (p.is_constant())
      cm.dropped.emplace_back(name, Rational(p.constant_value()));
    else
      cm.entries.push_back({name, p});
  }
  if (cm.entries.empty())
    throw InputError("coefficient_map: no non-constant coefficients");

  if (method == Method::Both) {
    CrossValidation cv = cross_validate(m, 3, /*seed=*/20240901);
    if (!cv.pass)
      throw InternalError("coefficient_map: engines disagree on " +
                          cv.first_failure->coefficient);
  }
  return cm;
}

ParamPoint random_rational_point(const std::vector<Sym>& symbols, Rng& rng) {
  ParamPoint p;
  for (Sym s : symbols) p.emplace(s, Rational(rng.uniform_int(1, 10000)));
  return p;
}

ParamPoint random_distinct_rational_point(const std::vector<Sym>& symbols, Rng& rng) {
  ParamPoint p;
  std::set<Rational> used;
  for (Sym s : symbols) {
    Rational v;
    do {
      v = Rational(rng.uniform_int(1, 10000));
    } while (!used.insert(v).second);
    p.emplace(s, v);
  }
  return p;
}

CrossValidation cross_validate(const Model& m, int trials, std::uint64_t seed,
                               bool inject_sign_flip) {
  CrossValidation cv;
  cv.trials = trials;
  cv.seed = seed;
  cv.pass = true;

  IOEquation eq = coeffs_forest(m);
  int input = m.inputs.front();
  std::vector<Sym> params = m.parameters();
  Rng base(seed);

  for (int t = 0; t < trials && cv.pass; ++t) {
    Rng trial_rng = base.fork(static_cast<std::uint64_t>(t));
    ParamPoint point = random_rational_point(params, trial_rng);
    NumericIOEq det = det_coefficients(m, eq.output, point);

    auto fail = [&](const std::string& name, const Rational& fv, const Rational& dv) {
      cv.pass = false;
      cv.first_failure = CrossValidation::Failure{point, name, fv, dv};
    };

    for (int k = 0; k < m.n && cv.pass; ++k) {
      Rational fv = eq.c[static_cast<std::size_t>(k)].evaluate(point);
      const Rational& dv = det.c[static_cast<std::size_t>(k)];
      if (fv != dv) fail("c" + std::to_string(k), fv, dv);
    }
    for (int k = 0; k < m.n && cv.pass; ++k) {
      Rational fv = eq.d.at(input)[static_cast<std::size_t>(k)].evaluate(point);
      Rational dv = det.d.at(input)[static_cast<std::size_t>(k)];
      if (inject_sign_flip) dv = -dv;
      if (fv != dv) fail("d" + std::to_string(k), fv, dv);
    }
  }
  return cv;
}

// ---------------------------------------------------------------------------
// CoeffFn implementations

namespace {

// Flat term list for fast double evaluation; indices into the symbol order.
struct CompiledPoly {
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> powers;  // (symbol index, exponent)
  };
  std::vector<Term> terms;

  static CompiledPoly compile(const MultiPoly& p, const std::map<Sym, int>& index) {
    CompiledPoly out;
    for (const auto& [mono, coef] : p.terms()) {
      Term t;
      t.coef = to_double(Rational(coef));
      for (const auto& [s, e] : mono.factors()) t.powers.emplace_back(index.at(s), e);
      out.terms.push_back(std::move(t));
    }
    return out;
  }

  double eval(const Eigen::VectorXd& x) const {
    double acc = 0;
    for (const Term& t : terms) {
      double v = t.coef;
      for (const auto& [idx, e] : t.powers)
        for (int q = 0; q < e; ++q) v *= x(idx);
      acc += v;
    }
    return acc;
  }
};

class SymbolicCoeffFn final : public CoeffFn {
 public:
  explicit SymbolicCoeffFn(CoefficientMap cm) : cm_(std::move(cm)) {
    for (const auto& e : cm_.entries) names_.push_back(e.name);
    std::map<Sym, int> index;
    for (std::size_t i = 0; i < cm_.symbols.size(); ++i)
      index.emplace(cm_.symbols[i], static_cast<int>(i));
    for (const auto& e : cm_.entries) {
      compiled_.push_back(CompiledPoly::compile(e.poly, index));
      std::vector<MultiPoly> row;
      std::vector<CompiledPoly> crow;
      for (Sym s : cm_.symbols) {
        row.push_back(e.poly.differentiate(s));
        crow.push_back(CompiledPoly::compile(row.back(), index));
      }
      partials_.push_back(std::move(row));
      compiled_partials_.push_back(std::move(crow));
    }
  }

  const std::vector<std::string>& names() const override { return names_; }
  const std::vector<Sym>& symbols() const override { return cm_.symbols; }

  std::vector<std::string> dropped_names() const override {
    std::vector<std::string> out;
    for (const auto& [name, value] : cm_.dropped) out.push_back(name);
    return out;
  }

  std::vector<Rational> values(const ParamPoint& point) const override {
    std::vector<Rational> out;
    for (const auto& e : cm_.entries) out.push_back(e.poly.evaluate(point));
    return out;
  }

  QMat jacobian(const ParamPoint& point) const override {
    QMat out;
    for (const auto& row : partials_) {
      std::vector<Rational> r;
      for (const auto& p : row) r.push_back(p.evaluate(point));
      out.push_back(std::move(r));
    }
    return out;
  }

  Eigen::VectorXd values_d(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd out(static_cast<Eigen::Index>(compiled_.size()));
    for (std::size_t i = 0; i < compiled_.size(); ++i)
      out(static_cast<Eigen::Index>(i)) = compiled_[i].eval(x);
    return out;
  }

  Eigen::MatrixXd jacobian_d(const Eigen::VectorXd& x) const override {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(compiled_partials_.size()),
                        static_cast<Eigen::Index>(cm_.symbols.size()));
    for (std::size_t i = 0; i < compiled_partials_.size(); ++i)
      for (std::size_t j = 0; j < cm_.symbols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            compiled_partials_[i][j].eval(x);
    return out;
  }

 private:
  CoefficientMap cm_;
  std::vector<std::string> names_;
  std::vector<std::vector<MultiPoly>> partials_;
  std::vector<CompiledPoly> compiled_;
  std::vector<std::vector<CompiledPoly>> compiled_partials_;
};

/* Determinant-backed coefficient evaluation for models outside the forest
 * regime. The full coefficient list is c_{n-1}..c_0 (the characteristic
 * polynomial is output-independent, so it appears once) followed by the d
 * lists per (output, input) pair, descending index. Constant entries are
 * identified at construction by exact sampling and filtered out. Exact
 * Jacobians cost one extra evaluation per parameter; each difference is the
 * exact partial because every coefficient is affine in each parameter. */
class DetCoeffFn final : public CoeffFn {
 public:
  DetCoeffFn(Model m, std::uint64_t probe_seed) : m_(std::move(m)) {
    if (m_.inputs.empty()) throw InputError("det evaluation needs at least one input");
    if (m_.outputs.empty()) throw InputError("det evaluation needs at least one output");
    symbols_ = m_.parameters();

    std::vector<std::string> all_names;
    for (int k = m_.n - 1; k >= 0; --k) all_names.push_back("c" + std::to_string(k));
    for (int i : m_.outputs)
      for (int j : m_.inputs)
        for (int k = m_.n - 1; k >= 0; --k)
          all_names.push_back(entry_name_multi(i, j, k));

    // An entry is constant iff its value and all exact partials agree at two
    // independent random points; a false positive would require both points
    // to land on a measure-zero locus.
    Rng rng(probe_seed);
    ParamPoint p1 = random_rational_point(symbols_, rng);
    ParamPoint p2 = random_rational_point(symbols_, rng);
    std::vector<Rational> v1 = raw_values(p1), v2 = raw_values(p2);
    QMat j1 = raw_jacobian(p1, v1), j2 = raw_jacobian(p2, v2);
    for (std::size_t e = 0; e < all_names.size(); ++e) {
      bool constant = v1[e] == v2[e];
      for (std::size_t p = 0; constant && p < symbols_.size(); ++p)
        if (j1[e][p] != 0 || j2[e][p] != 0) constant = false;
      if (constant)
        dropped_.push_back(all_names[e]);
      else {
        keep_.push_back(e);
        names_.push_back(all_names[e]);
      }
    }
    if (names_.empty()) throw InputError("coefficient_map: no non-constant coefficients");
  }

  const std::vector<std::string>& names() const override { return names_; }
  const std::vector<Sym>& symbols() const override { return symbols_; }
  std::vector<std::string> dropped_names() const override { return dropped_; }

  std::vector<Rational> values(const ParamPoint& point) const override {
    return filter(raw_values(point));
  }

  QMat jacobian(const ParamPoint& point) const override {
    QMat full = raw_jacobian(point, raw_values(point));
    QMat out;
    for (std::size_t e : keep_) out.push_back(full[e]);
    return out;
  }

  Eigen::VectorXd values_d(const Eigen::VectorXd& x) const override {
    std::vector<double> full = raw_values_d(x);
    Eigen::VectorXd out(static_cast<Eigen::Index>(keep_.size()));
    for (std::size_t i = 0; i < keep_.size(); ++i)
      out(static_cast<Eigen::Index>(i)) = full[keep_[i]];
    return out;
  }

  Eigen::MatrixXd jacobian_d(const Eigen::VectorXd& x) const override {
    std::vector<double> base = raw_values_d(x);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(keep_.size()),
                        static_cast<Eigen::Index>(symbols_.size()));
    for (std::size_t p = 0; p < symbols_.size(); ++p) {
      Eigen::VectorXd shifted = x;
      shifted(static_cast<Eigen::Index>(p)) += 1.0;
      std::vector<double> vp = raw_values_d(shifted);
      for (std::size_t i = 0; i < keep_.size(); ++i)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
            vp[keep_[i]] - base[keep_[i]];
    }
    return out;
  }

 private:
  std::string entry_name_multi(int output, int input, int k) const {
    std::string name;
    if (m_.outputs.size() > 1) name += "y" + std::to_string(output) + ".";
    if (m_.inputs.size() > 1) name += "u" + std::to_string(input) + ".";
    return name + "d" + std::to_string(k);
  }

  std::vector<Rational> raw_values(const ParamPoint& point) const {
    std::vector<Rational> out;
    bool first = true;
    for (int i : m_.outputs) {
      NumericIOEq eq = det_coefficients(m_, i, point);
      if (first) {
        for (int k = m_.n - 1; k >= 0; --k) out.push_back(eq.c[static_cast<std::size_t>(k)]);
        first = false;
      }
      for (int j : m_.inputs)
        for (int k = m_.n - 1; k >= 0; --k)
          out.push_back(eq.d.at(j)[static_cast<std::size_t>(k)]);
    }
    return out;
  }

  std::vector<double> raw_values_d(const Eigen::VectorXd& x) const {
    std::map<Sym, double> point;
    for (std::size_t p = 0; p < symbols_.size(); ++p)
      point.emplace(symbols_[p], x(static_cast<Eigen::Index>(p)));
    std::vector<double> out;
    bool first = true;
    for (int i : m_.outputs) {
      NumericIOEqD eq = det_coefficients_d(m_, i, point);
      if (first) {
        for (int k = m_.n - 1; k >= 0; --k) out.push_back(eq.c[static_cast<std::size_t>(k)]);
        first = false;
      }
      for (int j : m_.inputs)
        for (int k = m_.n - 1; k >= 0; --k)
          out.push_back(eq.d.at(j)[static_cast<std::size_t>(k)]);
    }
    return out;
  }

  QMat raw_jacobian(const ParamPoint& point, const std::vector<Rational>& base) const {
    QMat out(base.size(), std::vector<Rational>(symbols_.size()));
    for (std::size_t p = 0; p < symbols_.size(); ++p) {
      ParamPoint shifted = point;
      shifted[symbols_[p]] += 1;
      std::vector<Rational> vp = raw_values(shifted);
      for (std::size_t e = 0; e < base.size(); ++e) out[e][p] = vp[e] - base[e];
    }
    return out;
  }

  std::vector<Rational> filter(const std::vector<Rational>& full) const {
    std::vector<Rational> out;
    for (std::size_t e : keep_) out.push_back(full[e]);
    return out;
  }

  Model m_;
  std::vector<Sym> symbols_;
  std::vector<std::string> names_;
  std::vector<std::string> dropped_;
  std::vector<std::size_t> keep_;
};

}  // namespace

std::unique_ptr<CoeffFn> make_symbolic_coeff_fn(CoefficientMap cm) {
  return std::make_unique<SymbolicCoeffFn>(std::move(cm));
}

std::unique_ptr<CoeffFn> make_det_coeff_fn(const Model& m, std::uint64_t probe_seed) {
  return std::make_unique<DetCoeffFn>(m, probe_seed);
}

}  // namespace lcm
