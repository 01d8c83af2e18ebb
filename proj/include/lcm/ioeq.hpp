#ifndef LCM_IOEQ_HPP
#define LCM_IOEQ_HPP

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcm/linalg.hpp"
#include "lcm/model.hpp"
#include "lcm/multipoly.hpp"
#include "lcm/rng.hpp"

namespace lcm {

/* Input-output equation for one output i of an n-compartment model:
 *   y_i^(n) + c_{n-1} y_i^(n-1) + ... + c_0 y_i
 *     = sum over inputs j of (d^j_{n-1} u_j^(n-1) + ... + d^j_0 u_j).
 * c[k] and d[j][k] store the coefficient of the k-th derivative. */
struct IOEquation {
  int n = 0;
  int output = 0;
  std::vector<MultiPoly> c;                // size n
  std::map<int, std::vector<MultiPoly>> d; // input j -> size n
};

/* Symbolic coefficients by forest sums, for strongly connected single-input
 * single-output leak-free models (throws InputError otherwise):
 *   c_k = sum of edge products over (n-k)-edge spanning incoming forests of G;
 *   d_k = the same over (n-k-1)-edge forests of G with the output's outgoing
 *         edges removed, restricted to forests whose undirected component
 *         joins input and output.
 * No (-1)^{i+j} factor appears on the forest side; the determinant engine
 * carries that sign on its minor instead, and the two agree (cross_validate).
 * Guarantees c_0 = 0, and d_{n-1} = 0 for input != output (the principal
 * minor makes d_{n-1} = 1 when input = output). */
IOEquation coeffs_forest(const Model& m);

// Exact numeric coefficient values at one rational parameter point.
// c has n+1 entries (c[n] = 1 checked), each d entry has n.
struct NumericIOEq {
  int n = 0;
  int output = 0;
  std::vector<Rational> c;
  std::map<int, std::vector<Rational>> d;
};

/* Determinant engine: evaluates A at the point, forms det(sI - A) and the
 * signed minors (-1)^{i+j} det[(sI - A)^{j,i}] exactly at n+1 integer values
 * of s, and interpolates in s. Works for any model with at least one input,
 * leaks and multiple inputs/outputs included. Throws InputError if `output`
 * is not an output or the model has no inputs. */
NumericIOEq det_coefficients(const Model& m, int output, const ParamPoint& point);

// Same engine in double precision (for the float paths).
struct NumericIOEqD {
  int n = 0;
  int output = 0;
  std::vector<double> c;
  std::map<int, std::vector<double>> d;
};
NumericIOEqD det_coefficients_d(const Model& m, int output,
                                const std::map<Sym, double>& point);

enum class Method { Forest, Det, Both };

Method parse_method(const std::string& name);  // "forest" | "det" | "both"
std::string method_name(Method method);

/* Coefficient map: the non-constant input-output coefficients as named
 * polynomials over the full parameter list (so the domain dimension is
 * |edges| + |leaks| even when some parameter never appears). Entries are
 * ordered c_{n-1}..c_0 then, per input ascending, d_{n-1}..d_0, filtered to
 * non-constant entries; constants are recorded in `dropped`. Multi-output
 * models prefix names with "y<i>.", multi-input d entries with "u<j>.".
 * Throws InputError when every coefficient is constant ("no non-constant
 * coefficients"), or when `method` requires the forest engine on a model
 * outside its regime. */
struct CoefficientMap {
  struct Entry {
    std::string name;
    MultiPoly poly;
  };
  int n = 0;
  std::vector<Sym> symbols;  // sorted by name
  std::vector<Entry> entries;
  std::vector<std::pair<std::string, Rational>> dropped;
};

CoefficientMap coefficient_map(const Model& m, Method method = Method::Both);

/* Structural interface the classification pipeline runs against: exact
 * values and exact Jacobian at rational points, plus a double-precision
 * value/Jacobian pair for the fiber solver. Backed either by the symbolic
 * coefficient map or by the determinant engine (the latter computes exact
 * Jacobian columns as single finite differences, exact because every
 * parameter lives in one column of sI - A, making each coefficient affine in
 * each parameter alone). */
class CoeffFn {
 public:
  virtual ~CoeffFn() = default;
  virtual const std::vector<std::string>& names() const = 0;
  virtual const std::vector<Sym>& symbols() const = 0;
  // Coefficients found to be constant and excluded from the map.
  virtual std::vector<std::string> dropped_names() const { return {}; }
  virtual std::vector<Rational> values(const ParamPoint& point) const = 0;
  virtual QMat jacobian(const ParamPoint& point) const = 0;
  virtual Eigen::VectorXd values_d(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd jacobian_d(const Eigen::VectorXd& x) const = 0;
};

std::unique_ptr<CoeffFn> make_symbolic_coeff_fn(CoefficientMap cm);
std::unique_ptr<CoeffFn> make_det_coeff_fn(const Model& m, std::uint64_t probe_seed = 7);

struct CrossValidation {
  int trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  struct Failure {
    ParamPoint point;
    std::string coefficient;
    Rational forest_value;
    Rational det_value;
  };
  std::optional<Failure> first_failure;
};

/* Compares the two engines bit-exactly at `trials` random rational points
 * (integer coordinates uniform in 1..10^4). Requires the forest regime.
 * `inject_sign_flip` flips the sign of the determinant engine's d values so
 * tests can confirm the harness catches a planted bug. */
CrossValidation cross_validate(const Model& m, int trials, std::uint64_t seed,
                               bool inject_sign_flip = false);

// Random exact rational point on the given symbols (integers 1..10^4).
ParamPoint random_rational_point(const std::vector<Sym>& symbols, Rng& rng);
// Same but with pairwise-distinct coordinates.
ParamPoint random_distinct_rational_point(const std::vector<Sym>& symbols, Rng& rng);

}  // namespace lcm

#endif
