#ifndef LCM_UNIPOLY_HPP
#define LCM_UNIPOLY_HPP

#include <optional>
#include <utility>
#include <vector>

#include "lcm/rational.hpp"

namespace lcm {

// Univariate polynomial with exact rational coefficients, low degree first.
// coeff is kept normalized (no trailing zero high-order entries); the zero
// polynomial has an empty coefficient list and degree -1.
struct UniPoly {
  std::vector<Rational> coeff;

  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> c) : coeff(std::move(c)) { normalize(); }

  void normalize();
  int degree() const { return static_cast<int>(coeff.size()) - 1; }
  bool is_zero() const { return coeff.empty(); }

  Rational evaluate(const Rational& x) const;
  double evaluate(double x) const;
  UniPoly derivative() const;

  bool operator==(const UniPoly& other) const { return coeff == other.coeff; }
};

// Exact Lagrange interpolation through the given (x, y) pairs. Throws
// InputError on duplicate abscissae or an empty list.
UniPoly interpolate_univariate(const std::vector<std::pair<Rational, Rational>>& points);

/* Real roots with multiplicity, ascending. Companion-matrix eigenvalues
 * polished by Newton iteration; eigenvalues with |imag| <= 1e-8 (scaled by
 * max(1, |z|)) are treated as real. Throws InputError on the zero polynomial;
 * a nonzero constant has no roots. */
std::vector<double> real_roots(const UniPoly& p);
std::vector<double> real_roots(const std::vector<double>& coeff_low_to_high);

/* Inverts the elementary-symmetric map: given e_1..e_m, returns the multiset
 * {x_1..x_m} (ascending) with e_k({x}) = e_k, i.e. the roots of
 * z^m - e_1 z^{m-1} + ... + (-1)^m e_m. Returns nullopt when the inverse
 * leaves the reals: some root has |imag| > 1e-6 (scaled), or the recovered
 * multiset fails to reproduce the inputs within 1e-6 relative. The looser
 * imaginary cutoff (vs real_roots) admits repeated entries, whose companion
 * eigenvalues sit ~sqrt(machine epsilon) off the real axis. */
std::optional<std::vector<double>> recover_multiset(const std::vector<double>& e);

}  // namespace lcm

#endif
