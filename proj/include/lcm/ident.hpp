#ifndef LCM_IDENT_HPP
#define LCM_IDENT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lcm/ioeq.hpp"
#include "lcm/model.hpp"

namespace lcm {

enum class VerdictClass {
  GloballyIdentifiable,
  GenericallyGloballyIdentifiable,
  Sling,  // structurally locally but not globally identifiable
  Unidentifiable,
  LocallyIdentifiableUnresolved,
};

std::string to_string(VerdictClass c);

struct Evidence {
  std::string kind;    // closed-form | rank-test | symmetry-witness | fiber-sample | conjecture-support
  std::string detail;
};

struct Verdict {
  std::string parameter;
  VerdictClass cls = VerdictClass::LocallyIdentifiableUnresolved;
  std::vector<Evidence> evidence;
};

/* Per-model background knowledge consulted before any numerical work:
 * closed-form recoveries (which outrank sampling evidence) and the set of
 * parameters whose non-identifiability is conjectured rather than proved,
 * used to tag rank-test verdicts. */
struct ClosedFormRegistry {
  struct Entry {
    VerdictClass cls = VerdictClass::GloballyIdentifiable;
    std::string formula;
  };
  std::map<std::string, Entry> closed_forms;  // parameter name -> entry
  std::set<std::string> conjecture_unidentifiable;
};

struct ClassifyConfig {
  std::uint64_t seed = 42;
  int points = 5;             // rank-test sample points
  int starts = 200;           // Newton starts per fiber run (0 disables fibers)
  int fiber_base_points = 3;
  Method method = Method::Both;
  const ClosedFormRegistry* registry = nullptr;
};

// Exact Jacobian of the symbolic coefficient map: rows follow cm.entries,
// columns cm.symbols.
QMat jacobian(const CoefficientMap& cm, const ParamPoint& point);

struct ModelIdentifiability {
  bool identifiable = false;
  int generic_rank = 0;
  int dimension = 0;  // |edges| + |leaks|
};

/* Generic-rank test: the model is (locally, hence here structurally)
 * identifiable iff the coefficient-map Jacobian reaches full column rank
 * |edges| + |leaks| at the sampled random rational points. Rank is exact, so
 * the only sampling risk is landing on a measure-zero locus; the maximum
 * over points is the generic rank. */
ModelIdentifiability model_identifiability(const Model& m, int points = 5,
                                           std::uint64_t seed = 42);

// dp lies in the row space of the Jacobian at generic points:
// rank([J; e_p]) == rank(J).
bool parameter_local_identifiability(const Model& m, Sym p, int points = 5,
                                     std::uint64_t seed = 42);

struct SymmetryWitness {
  Permutation sigma;
  std::string parameter;     // the parameter being witnessed
  std::string maps_to;       // its image under sigma
  ParamPoint point;          // exact point where C(point) == C(permuted point)
};

/* Searches the automorphism group for a permutation moving p's edge (or
 * leak). A hit is verified exactly: the coefficient map takes equal values
 * at a random point and its coordinate-permuted image, while the p
 * coordinate changes, certifying p is not generically globally
 * identifiable. */
std::optional<SymmetryWitness> symmetry_sling_witness(const Model& m, Sym p,
                                                      std::uint64_t seed = 42);

struct FiberSolution {
  std::vector<double> x;
  double residual = 0;
  int start_index = 0;
  int cluster_size = 1;
};

struct FiberReport {
  std::vector<Sym> symbols;
  std::vector<double> base;    // k*
  std::vector<double> target;  // C(k*)
  std::vector<FiberSolution> solutions;  // cluster representatives
  std::map<Sym, int> distinct_count;     // per-parameter distinct values
  int starts = 0;
  int converged = 0;
  double min_residual = 0;
  double max_residual = 0;
  bool sign_crossing = false;  // some solution leaves the positive orthant
  std::uint64_t seed = 0;
};

/* Samples the fiber C^{-1}(C(k*)) by damped Gauss-Newton from `starts`
 * random starts (uniform in [0.1, 10]^P; start 0 is k* itself; per-start
 * RNG derived from seed and start index, so results are order- and
 * thread-independent). Converged solutions (scaled residual <= 1e-10) are
 * clustered at 1e-6 in the infinity norm. */
FiberReport fiber_sample(const Model& m, const ParamPointD& kstar, int starts = 200,
                         std::uint64_t seed = 42, Method method = Method::Both);
FiberReport fiber_sample_fn(const CoeffFn& fn, const std::vector<double>& base,
                            int starts, std::uint64_t seed);

/* Classification pipeline for one model: builds the coefficient evaluation
 * once, shares rank points and fiber reports across parameters, and applies
 * the aggregation rules of classify_parameter. */
class Analyzer {
 public:
  Analyzer(Model m, ClassifyConfig cfg);
  ~Analyzer();

  const Model& model() const;
  const CoeffFn& fn() const;
  ModelIdentifiability identifiability();
  bool locally_identifiable(Sym p);
  std::optional<SymmetryWitness> witness(Sym p);
  const std::vector<FiberReport>& fibers();

  Verdict classify(Sym p);
  std::vector<Verdict> classify_all();  // parameters in name order

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/* Verdict aggregation, in order: closed-form registry hit; exact rank test
 * false -> Unidentifiable; symmetry witness -> SLING; fiber distinct-count
 * >= 2 at some base point -> SLING; distinct-count 1 at every base point ->
 * GenericallyGloballyIdentifiable (flagged empirical); otherwise
 * LocallyIdentifiableUnresolved. */
Verdict classify_parameter(const Model& m, Sym p, const ClassifyConfig& cfg = {});

}  // namespace lcm

#endif
