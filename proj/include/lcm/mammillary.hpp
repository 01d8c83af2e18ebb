#ifndef LCM_MAMMILLARY_HPP
#define LCM_MAMMILLARY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcm/ident.hpp"
#include "lcm/model.hpp"
#include "lcm/multipoly.hpp"

namespace lcm {

/* Star families: n compartments, center 1 exchanging with every other
 * compartment in both directions, one input and one output, no leaks. A
 * family is named by the (input, output) pair of its representative
 * labeling: (1,1), (1,2), (2,1), (2,2) and (2,3) cover every case up to
 * relabeling. */
struct FamilyId {
  int n = 0;
  int in = 0;
  int out = 0;
  std::string label() const;  // "(1,2)"
};

bool family_pair_valid(int in, int out);
// Smallest n for which the family exists: 3 for (1,1), else 4.
int family_min_n(int in, int out);

// Bidirected star with center 1; input at in_comp, output at out_comp.
Model make_mammillary(int n, int in_comp, int out_comp);

/* Recognizes any relabeling of a star-family member and returns the family
 * plus the permutation sigma taking model labels to representative labels
 * (center -> 1, then input/output to 2/3 as the family requires, remaining
 * vertices in ascending order). */
std::optional<std::pair<FamilyId, Permutation>> detect_mammillary(const Model& m);

/* Structure of the left-hand-side coefficients of the n-star (they depend
 * only on the graph): with Sigma = {k13, ..., k1n},
 *   c_{n-1-t} = k21 * e_t(Sigma) + k12 * g_t + g_{t+1}   (t = 0..n-2),
 * where g_i sums the i-edge spanning incoming forests of the star with both
 * edges between 1 and 2 removed (g_0 = 1, g_{n-1} = 0), and each g splits
 * linearly in the outgoing rates:
 *   g_r = e_r(Sigma) + sum_c M[r-1][c] * k_{c+3,1},
 *   M[a][c] = e_a(Sigma minus its c-th element)   (a, c = 0..n-3).
 * Construction verifies both identities exactly and throws InternalError if
 * either fails. */
struct LhsStructure {
  int n = 0;
  std::vector<Sym> sigma;                  // k13..k1n
  std::vector<MultiPoly> g;                // g[0..n-1]
  std::vector<std::vector<MultiPoly>> M;   // (n-2) x (n-2)
};

LhsStructure lhs_structure(int n);

// det(M) == +-prod_{3<=j<l<=n} (k1j - k1l); sign is 0 when it fails to match.
struct VandermondeCheck {
  bool matches = false;
  int sign = 0;
};
VandermondeCheck vandermonde_check(int n);

/* Residual of the alternating-sum identity at an exact point:
 *   sum_{t=0}^{n-2} (-1)^t k12^{n-2-t} c_{n-1-t}
 *     - [ (sum_t (-1)^t k12^{n-2-t} e_t(Sigma)) * k21 + k12^{n-1} ],
 * which is zero for every parameter point of the star. */
Rational big_sum_residual(int n, const ParamPoint& point);

/* Parameter recovery from one coefficient list (c[k], d[k] = coefficient of
 * the k-th derivative; both sized n, constant-coefficient entries included).
 * Throws InputError on degenerate inputs: vanishing pivot coefficients,
 * alternating-sum denominator near zero, or a recovered multiset leaving the
 * reals. k12_candidates lists the real roots (ascending) of the degree-(n-1)
 * polynomial whose root set is {k12} plus the negated nonzero spectrum of
 * the reduced star; incoming_multiset is the recovered multiset of incoming
 * rates (Sigma, or Sigma' = {k14..k1n} for family (2,3)), ascending. */
struct Recovery {
  FamilyId family;
  std::map<std::string, double> values;
  std::vector<double> k12_candidates;
  std::vector<double> incoming_multiset;
  std::optional<double> k12_k31_product;
  std::vector<std::string> notes;
};
Recovery recover(const FamilyId& family, const std::vector<double>& c,
                 const std::vector<double>& d);

// The closed-form subset of recover() in exact arithmetic.
struct ExactRecovery {
  FamilyId family;
  std::map<std::string, Rational> values;
  std::optional<Rational> k12_k31_product;
  std::vector<std::string> notes;
};
ExactRecovery recover_exact(const FamilyId& family, const std::vector<Rational>& c,
                            const std::vector<Rational>& d);

/* For the (1,2) family: constructs a second parameter point with the same
 * input-output coefficients but a different k12. The new k12 is chosen among
 * the other real roots of the companion polynomial (root_choice = 0 picks
 * the largest, up to n-3 alternates exist); the outgoing rates solve the
 * shifted linear system, and the incoming rates and k21 carry over. Requires
 * pairwise-distinct incoming rates and all companion roots real and simple
 * (InputError otherwise). The returned point is verified to reproduce the
 * coefficients to 1e-9 relative infinity error (InternalError otherwise). */
ParamPointD alternate_point_M12(int n, const ParamPointD& kstar, int root_choice = 0);

// Registry of proven closed-form verdicts (and, for family (2,3) with
// n >= 5, the conjectured unidentifiable set) in representative labels.
ClosedFormRegistry closed_form_registry(const FamilyId& family);
// The same registry with parameter names rewritten through rho
// (representative labels -> model labels).
ClosedFormRegistry relabel_registry(const ClosedFormRegistry& reg, const Permutation& rho);

struct TableCell {
  FamilyId family;
  ModelIdentifiability model_ident;
  std::vector<Verdict> verdicts;
};

struct ClassificationTable {
  int n_max = 0;
  std::uint64_t seed = 0;
  int points = 0;
  int starts = 0;
  int fiber_base_points = 0;
  std::vector<TableCell> cells;  // family-major, n ascending within a family
};

/* Classifies every parameter of every family member up to n_max (n_max >= 5
 * so each family contributes). Each cell runs with its own seed derived from
 * (family, n), so results do not depend on evaluation order; cells may run
 * in parallel. cfg.registry is ignored: each cell consults its own family
 * registry. */
ClassificationTable classification_table(int n_max, const ClassifyConfig& cfg = {});

/* Numerical and symbolic evidence around the (2,3) family, where full
 * unidentifiability of {k12, k21, k13, k31, k41..kn1} is conjectured for
 * n >= 5: exact generic rank, the per-parameter rank split, and the two
 * structural facts that drive it (the top d-coefficient vanishes and the
 * next one equals k12*k31). */
struct ConjectureProbe {
  int n = 0;
  int generic_rank = 0;
  int dimension = 0;
  std::vector<std::string> rank_deficient;
  std::vector<std::string> locally_identifiable;
  bool d_top_zero = false;
  bool d_product_match = false;
};
ConjectureProbe conjecture_probe_M23(int n, int points = 5, std::uint64_t seed = 42);

}  // namespace lcm

#endif
