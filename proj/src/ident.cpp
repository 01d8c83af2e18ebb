#include "lcm/ident.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "lcm/errors.hpp"
#include "lcm/linalg.hpp"
#include "lcm/rng.hpp"

namespace lcm {

std::string to_string(VerdictClass c) {
  switch (c) {
    case VerdictClass::GloballyIdentifiable: return "GloballyIdentifiable";
    case VerdictClass::GenericallyGloballyIdentifiable: return "GenericallyGloballyIdentifiable";
    case VerdictClass::Sling: return "SLING";
    case VerdictClass::Unidentifiable: return "Unidentifiable";
    case VerdictClass::LocallyIdentifiableUnresolved: return "LocallyIdentifiableUnresolved";
  }
  throw InternalError("unhandled verdict class");
}

QMat jacobian(const CoefficientMap& cm, const ParamPoint& point) {
  QMat out;
  out.reserve(cm.entries.size());
  for (const auto& entry : cm.entries) {
    std::vector<Rational> row;
    row.reserve(cm.symbols.size());
    for (Sym s : cm.symbols) row.push_back(entry.poly.differentiate(s).evaluate(point));
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::unique_ptr<CoeffFn> build_fn(const Model& m, Method method) {
  switch (method) {
    case Method::Forest:
      return make_symbolic_coeff_fn(coefficient_map(m, Method::Forest));
    case Method::Det:
      return make_det_coeff_fn(m);
    case Method::Both:
      if (validate(m).forest_formula_applicable)
        return make_symbolic_coeff_fn(coefficient_map(m, Method::Both));
      return make_det_coeff_fn(m);
  }
  throw InternalError("unhandled method");
}

std::size_t symbol_index(const std::vector<Sym>& symbols, Sym p) {
  auto it = std::find(symbols.begin(), symbols.end(), p);
  if (it == symbols.end()) throw InputError("not a parameter of this model: " + p.name());
  return static_cast<std::size_t>(it - symbols.begin());
}

// The model element carrying parameter p: an edge (from, to), or a leak when
// from == 0.
std::pair<int, int> parameter_element(const Model& m, Sym p) {
  for (const Edge& e : m.edges)
    if (Model::edge_symbol(e.from, e.to) == p) return {e.from, e.to};
  for (int j : m.leaks)
    if (Model::leak_symbol(j) == p) return {0, j};
  throw InputError("not a parameter of this model: " + p.name());
}

ParamPoint permuted_point(const Model& m, const ParamPoint& x, const Permutation& sigma) {
  ParamPoint y;
  for (const Edge& e : m.edges) {
    Sym from_sym = Model::edge_symbol(e.from, e.to);
    Sym to_sym = Model::edge_symbol(sigma.to(e.from), sigma.to(e.to));
    y[to_sym] = x.at(from_sym);
  }
  for (int j : m.leaks) y[Model::leak_symbol(sigma.to(j))] = x.at(Model::leak_symbol(j));
  return y;
}

}  // namespace

struct Analyzer::Impl {
  Model model;
  ClassifyConfig cfg;
  std::unique_ptr<CoeffFn> fn;

  bool rank_data_ready = false;
  std::vector<ParamPoint> rank_points;
  std::vector<QMat> jacs;
  std::vector<int> point_ranks;
  int generic_rank = 0;

  std::map<Sym, std::optional<SymmetryWitness>> witness_cache;

  bool fibers_ready = false;
  std::vector<FiberReport> fiber_reports;

  explicit Impl(Model m, ClassifyConfig c) : model(std::move(m)), cfg(c) {
    fn = build_fn(model, cfg.method);
  }

  void ensure_rank_data() {
    if (rank_data_ready) return;
    if (cfg.points < 1) throw InputError("rank test needs at least one sample point");
    Rng base(cfg.seed);
    for (int t = 0; t < cfg.points; ++t) {
      Rng r = base.fork(100 + static_cast<std::uint64_t>(t));
      ParamPoint p = random_rational_point(fn->symbols(), r);
      QMat j = fn->jacobian(p);
      point_ranks.push_back(rank_exact(j));
      generic_rank = std::max(generic_rank, point_ranks.back());
      rank_points.push_back(std::move(p));
      jacs.push_back(std::move(j));
    }
    rank_data_ready = true;
  }

  // rank([J; e_p]) == rank(J) at the best sample point. Both ranks only ever
  // undershoot their generic values on a measure-zero locus, so the maxima
  // over the shared points are compared.
  bool locally_identifiable(Sym p) {
    ensure_rank_data();
    std::size_t col = symbol_index(fn->symbols(), p);
    int augmented = 0;
    for (const QMat& j : jacs) {
      QMat aug = j;
      std::vector<Rational> row(fn->symbols().size(), Rational(0));
      row[col] = 1;
      aug.push_back(std::move(row));
      augmented = std::max(augmented, rank_exact(aug));
    }
    return augmented == generic_rank;
  }

  std::optional<SymmetryWitness> witness(Sym p) {
    auto cached = witness_cache.find(p);
    if (cached != witness_cache.end()) return cached->second;

    auto [from, to] = parameter_element(model, p);
    std::optional<Permutation> mover;
    for_each_automorphism(model, [&](const Permutation& sigma) {
      if (sigma.is_identity()) return true;
      bool moves = from == 0 ? sigma.to(to) != to
                             : sigma.to(from) != from || sigma.to(to) != to;
      if (!moves) return true;
      mover = sigma;
      return false;
    });
    if (!mover) {
      witness_cache.emplace(p, std::nullopt);
      return std::nullopt;
    }

    Rng rng = Rng(cfg.seed).fork(300);
    ParamPoint x = random_distinct_rational_point(fn->symbols(), rng);
    ParamPoint y = permuted_point(model, x, *mover);
    if (fn->values(x) != fn->values(y))
      throw InternalError("automorphism failed to preserve the coefficient map");
    if (x.at(p) == y.at(p))
      throw InternalError("symmetry witness left the parameter fixed");

    SymmetryWitness w;
    w.sigma = *mover;
    w.parameter = p.name();
    w.maps_to = from == 0 ? Model::leak_symbol(mover->to(to)).name()
                          : Model::edge_symbol(mover->to(from), mover->to(to)).name();
    w.point = std::move(x);
    witness_cache.emplace(p, w);
    return w;
  }

  const std::vector<FiberReport>& fibers() {
    if (fibers_ready) return fiber_reports;
    const auto& symbols = fn->symbols();
    for (int b = 0; b < cfg.fiber_base_points; ++b) {
      Rng rb = Rng(cfg.seed).fork(200 + static_cast<std::uint64_t>(b));
      std::vector<double> base(symbols.size());
      for (double& v : base) v = rb.uniform(0.5, 5.0);
      fiber_reports.push_back(fiber_sample_fn(*fn, base, cfg.starts, rb.next()));
    }
    fibers_ready = true;
    return fiber_reports;
  }
};

Analyzer::Analyzer(Model m, ClassifyConfig cfg)
    : impl_(std::make_unique<Impl>(std::move(m), cfg)) {}
Analyzer::~Analyzer() = default;

const Model& Analyzer::model() const { return impl_->model; }
const CoeffFn& Analyzer::fn() const { return *impl_->fn; }

ModelIdentifiability Analyzer::identifiability() {
  impl_->ensure_rank_data();
  ModelIdentifiability out;
  out.dimension = static_cast<int>(impl_->fn->symbols().size());
  out.generic_rank = impl_->generic_rank;
  out.identifiable = out.generic_rank == out.dimension;
  return out;
}

bool Analyzer::locally_identifiable(Sym p) { return impl_->locally_identifiable(p); }

std::optional<SymmetryWitness> Analyzer::witness(Sym p) { return impl_->witness(p); }

const std::vector<FiberReport>& Analyzer::fibers() { return impl_->fibers(); }

Verdict Analyzer::classify(Sym p) {
  Verdict v;
  v.parameter = p.name();
  symbol_index(impl_->fn->symbols(), p);  // reject non-parameters

  if (impl_->cfg.registry) {
    auto hit = impl_->cfg.registry->closed_forms.find(v.parameter);
    if (hit != impl_->cfg.registry->closed_forms.end()) {
      v.cls = hit->second.cls;
      v.evidence.push_back({"closed-form", hit->second.formula});
      return v;
    }
  }

  impl_->ensure_rank_data();
  std::string rank_detail = "generic rank " + std::to_string(impl_->generic_rank) + " of " +
                            std::to_string(impl_->fn->symbols().size()) + " at " +
                            std::to_string(impl_->cfg.points) + " exact sample points";
  if (!impl_->locally_identifiable(p)) {
    v.cls = VerdictClass::Unidentifiable;
    v.evidence.push_back(
        {"rank-test", "gradient stays outside the Jacobian row space; " + rank_detail});
    if (impl_->cfg.registry &&
        impl_->cfg.registry->conjecture_unidentifiable.count(v.parameter))
      v.evidence.push_back(
          {"conjecture-support",
           "rank deficit matches the conjectured unidentifiable set for this family"});
    return v;
  }
  v.evidence.push_back({"rank-test", "locally identifiable; " + rank_detail});

  if (auto w = impl_->witness(p)) {
    v.cls = VerdictClass::Sling;
    v.evidence.push_back(
        {"symmetry-witness", "automorphism " + w->sigma.cycles() + " maps " + w->parameter +
                                 " to " + w->maps_to +
                                 "; coefficient map verified equal at an exact random point"});
    return v;
  }

  if (impl_->cfg.starts > 0 && impl_->cfg.fiber_base_points > 0) {
    const auto& reports = impl_->fibers();
    int max_distinct = 0, where = -1;
    for (std::size_t b = 0; b < reports.size(); ++b) {
      int d = reports[b].distinct_count.at(p);
      if (d > max_distinct) {
        max_distinct = d;
        where = static_cast<int>(b);
      }
    }
    std::string scope = std::to_string(reports.size()) + " base points (" +
                        std::to_string(impl_->cfg.starts) + " starts each)";
    if (max_distinct >= 2) {
      v.cls = VerdictClass::Sling;
      v.evidence.push_back({"fiber-sample", std::to_string(max_distinct) +
                                                " distinct fiber values at base point " +
                                                std::to_string(where + 1) + " of " + scope});
      return v;
    }
    if (max_distinct == 1) {
      v.cls = VerdictClass::GenericallyGloballyIdentifiable;
      v.evidence.push_back(
          {"fiber-sample",
           "single fiber value across " + scope + "; empirical evidence, not a proof"});
      return v;
    }
    v.evidence.push_back({"fiber-sample", "no converged fiber solutions across " + scope});
  }

  v.cls = VerdictClass::LocallyIdentifiableUnresolved;
  return v;
}

std::vector<Verdict> Analyzer::classify_all() {
  std::vector<Verdict> out;
  for (Sym p : impl_->model.parameters()) out.push_back(classify(p));
  return out;
}

ModelIdentifiability model_identifiability(const Model& m, int points, std::uint64_t seed) {
  ClassifyConfig cfg;
  cfg.points = points;
  cfg.seed = seed;
  return Analyzer(m, cfg).identifiability();
}

bool parameter_local_identifiability(const Model& m, Sym p, int points, std::uint64_t seed) {
  ClassifyConfig cfg;
  cfg.points = points;
  cfg.seed = seed;
  return Analyzer(m, cfg).locally_identifiable(p);
}

std::optional<SymmetryWitness> symmetry_sling_witness(const Model& m, Sym p,
                                                      std::uint64_t seed) {
  ClassifyConfig cfg;
  cfg.seed = seed;
  return Analyzer(m, cfg).witness(p);
}

FiberReport fiber_sample_fn(const CoeffFn& fn, const std::vector<double>& base, int starts,
                            std::uint64_t seed) {
  const auto& symbols = fn.symbols();
  const std::size_t P = symbols.size();
  if (base.size() != P) throw InputError("fiber base point has wrong dimension");
  if (starts < 1) throw InputError("fiber sampling needs at least one start");

  FiberReport report;
  report.symbols = symbols;
  report.base = base;
  report.starts = starts;
  report.seed = seed;

  Eigen::VectorXd kstar = Eigen::Map<const Eigen::VectorXd>(base.data(), static_cast<Eigen::Index>(P));
  Eigen::VectorXd target = fn.values_d(kstar);
  report.target.assign(target.data(), target.data() + target.size());
  const double tscale = std::max(1.0, target.norm());

  struct RawSolution {
    std::vector<double> x;
    double residual;
  };
  std::vector<std::optional<RawSolution>> raw(static_cast<std::size_t>(starts));

  auto residual_norm = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r = fn.values_d(x) - target;
    double n = r.norm() / tscale;
    return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
  };

  for (int s = 0; s < starts; ++s) {
    Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(s));
    Eigen::VectorXd x(static_cast<Eigen::Index>(P));
    if (s == 0) {
      x = kstar;
    } else {
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(0.1, 10.0);
    }
    Eigen::VectorXd r;
    double rn = residual_norm(x, r);
    bool alive = std::isfinite(rn);
    for (int iter = 0; alive && rn > 1e-10 && iter < 200; ++iter) {
      Eigen::MatrixXd J = fn.jacobian_d(x);
      if (!J.allFinite()) break;
      Eigen::VectorXd dx = J.colPivHouseholderQr().solve(-r);
      double lambda = 1.0;
      bool improved = false;
      for (int halve = 0; halve < 30; ++halve) {
        Eigen::VectorXd xt = x + lambda * dx;
        Eigen::VectorXd rt;
        double rnt = residual_norm(xt, rt);
        if (rnt < rn) {
          x = std::move(xt);
          r = std::move(rt);
          rn = rnt;
          improved = true;
          break;
        }
        lambda /= 2;
      }
      if (!improved) break;
    }
    if (alive && rn <= 1e-10)
      raw[static_cast<std::size_t>(s)] =
          RawSolution{std::vector<double>(x.data(), x.data() + x.size()), rn};
  }

  // Greedy clustering in start order keeps representatives deterministic.
  report.min_residual = std::numeric_limits<double>::infinity();
  report.max_residual = 0;
  for (int s = 0; s < starts; ++s) {
    const auto& slot = raw[static_cast<std::size_t>(s)];
    if (!slot) continue;
    ++report.converged;
    report.min_residual = std::min(report.min_residual, slot->residual);
    report.max_residual = std::max(report.max_residual, slot->residual);
    for (double v : slot->x)
      if (v <= 0) report.sign_crossing = true;
    bool merged = false;
    for (auto& rep : report.solutions) {
      double dist = 0;
      for (std::size_t i = 0; i < P; ++i)
        dist = std::max(dist, std::abs(rep.x[i] - slot->x[i]));
      if (dist <= 1e-6) {
        ++rep.cluster_size;
        rep.residual = std::min(rep.residual, slot->residual);
        merged = true;
        break;
      }
    }
    if (!merged) report.solutions.push_back({slot->x, slot->residual, s, 1});
  }
  if (report.converged == 0) report.min_residual = 0;

  for (std::size_t i = 0; i < P; ++i) {
    std::vector<double> vals;
    vals.reserve(report.solutions.size());
    for (const auto& rep : report.solutions) vals.push_back(rep.x[i]);
    std::sort(vals.begin(), vals.end());
    int distinct = 0;
    for (std::size_t k = 0; k < vals.size(); ++k)
      if (k == 0 || vals[k] - vals[k - 1] > 1e-6) ++distinct;
    report.distinct_count[symbols[i]] = distinct;
  }
  return report;
}

FiberReport fiber_sample(const Model& m, const ParamPointD& kstar, int starts,
                         std::uint64_t seed, Method method) {
  auto fn = build_fn(m, method);
  std::vector<double> base;
  base.reserve(fn->symbols().size());
  for (Sym s : fn->symbols()) {
    auto it = kstar.find(s);
    if (it == kstar.end()) throw InputError("fiber base point misses parameter " + s.name());
    base.push_back(it->second);
  }
  return fiber_sample_fn(*fn, base, starts, seed);
}

Verdict classify_parameter(const Model& m, Sym p, const ClassifyConfig& cfg) {
  return Analyzer(m, cfg).classify(p);
}

}  // namespace lcm
