#ifndef LCM_MULTIPOLY_HPP
#define LCM_MULTIPOLY_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lcm/rational.hpp"
#include "lcm/symbol.hpp"

namespace lcm {

// Power product over symbols: factors sorted by symbol, exponents >= 1.
class Monomial {
 public:
  Monomial() = default;

  static Monomial one() { return Monomial(); }
  static Monomial var(Sym s, int exponent = 1);

  int degree() const;
  bool is_one() const { return factors_.empty(); }
  const std::vector<std::pair<Sym, int>>& factors() const { return factors_; }

  Monomial operator*(const Monomial& other) const;
  bool operator==(const Monomial& other) const { return factors_ == other.factors_; }

 private:
  std::vector<std::pair<Sym, int>> factors_;
};

// Strict weak order putting the graded-lex largest monomial first: higher
// total degree wins; on ties, the monomial with the larger exponent at the
// first (name-ordered) symbol where they differ wins. This is the term order
// used for canonical serialization.
struct MonomialDescOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

using ParamPoint = std::map<Sym, Rational>;
using ParamPointD = std::map<Sym, double>;

/* Sparse multivariate polynomial with arbitrary-precision integer
 * coefficients. Values are immutable in spirit: every operation returns a new
 * polynomial, so sharing across threads is safe. */
class MultiPoly {
 public:
  MultiPoly() = default;

  static MultiPoly zero() { return MultiPoly(); }
  static MultiPoly constant(BigInt c);
  static MultiPoly variable(Sym s);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // Zero polynomial evaluates to 0; throws InternalError if non-constant.
  BigInt constant_value() const;

  int degree() const;  // total degree; -1 for the zero polynomial
  std::set<Sym> symbols() const;
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Monomial, BigInt, MonomialDescOrder>& terms() const { return terms_; }

  MultiPoly operator+(const MultiPoly& other) const;
  MultiPoly operator-(const MultiPoly& other) const;
  MultiPoly operator-() const;
  MultiPoly operator*(const MultiPoly& other) const;
  MultiPoly pow(int exponent) const;  // throws InputError if exponent < 0

  bool operator==(const MultiPoly& other) const { return terms_ == other.terms_; }
  bool operator!=(const MultiPoly& other) const { return !(*this == other); }

  // Exact evaluation. Every symbol appearing in the polynomial must be
  // assigned; extra assignments are ignored. Throws InputError on a missing
  // assignment.
  Rational evaluate(const ParamPoint& point) const;

  // Floating-point evaluation with the same missing-assignment contract.
  double evaluate_double(const ParamPointD& point) const;

  // Formal partial derivative; a symbol absent from the polynomial gives 0.
  MultiPoly differentiate(Sym s) const;

  // Canonical form: terms in descending graded-lex order joined by " + ";
  // each term "coef*sym*sym^e" with '^e' only for exponents >= 2. The zero
  // polynomial prints "0".
  std::string to_string() const;

 private:
  void add_term(const Monomial& m, const BigInt& coef);
  std::map<Monomial, BigInt, MonomialDescOrder> terms_;
};

// e_k over the given symbols; e_0 = 1. Throws InputError unless
// 0 <= k <= symbols.size().
MultiPoly elementary_symmetric(int k, const std::vector<Sym>& symbols);

// Dense n x n grid of polynomials with 1-based element access.
struct SymbolicMatrix {
  int n = 0;
  std::vector<MultiPoly> entries;  // row-major

  static SymbolicMatrix zero(int n);
  MultiPoly& at(int i, int j);
  const MultiPoly& at(int i, int j) const;
};

}  // namespace lcm

#endif
