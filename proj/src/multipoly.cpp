#include "lcm/multipoly.hpp"

#include <algorithm>

#include "lcm/errors.hpp"

namespace lcm {

Monomial Monomial::var(Sym s, int exponent) {
  if (!s.valid()) throw InputError("invalid symbol in monomial");
  if (exponent < 0) throw InputError("negative exponent in monomial");
  Monomial m;
  if (exponent > 0) m.factors_.emplace_back(s, exponent);
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [s, e] : factors_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin(), ae = factors_.end();
  auto b = other.factors_.begin(), be = other.factors_.end();
  while (a != ae && b != be) {
    if (a->first == b->first) {
      out.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    } else if (a->first < b->first) {
      out.factors_.push_back(*a++);
    } else {
      out.factors_.push_back(*b++);
    }
  }
  out.factors_.insert(out.factors_.end(), a, ae);
  out.factors_.insert(out.factors_.end(), b, be);
  return out;
}

bool MonomialDescOrder::operator()(const Monomial& a, const Monomial& b) const {
  int da = a.degree(), db = b.degree();
  if (da != db) return da > db;
  // Walk both factor lists in symbol order; exponent 0 where a symbol is
  // missing. The first difference decides: larger exponent sorts first.
  auto ai = a.factors().begin(), ae = a.factors().end();
  auto bi = b.factors().begin(), be = b.factors().end();
  while (ai != ae && bi != be) {
    if (ai->first == bi->first) {
      if (ai->second != bi->second) return ai->second > bi->second;
      ++ai;
      ++bi;
    } else if (ai->first < bi->first) {
      return true;  // a has positive exponent where b has 0
    } else {
      return false;
    }
  }
  if (ai != ae) return true;
  return false;  // b has leftover factors, or equal
}

MultiPoly MultiPoly::constant(BigInt c) {
  MultiPoly p;
  if (c != 0) p.terms_.emplace(Monomial::one(), std::move(c));
  return p;
}

MultiPoly MultiPoly::variable(Sym s) {
  MultiPoly p;
  p.terms_.emplace(Monomial::var(s), BigInt(1));
  return p;
}

bool MultiPoly::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && terms_.begin()->first.is_one();
}

BigInt MultiPoly::constant_value() const {
  if (terms_.empty()) return BigInt(0);
  if (!is_constant()) throw InternalError("constant_value() on a non-constant polynomial");
  return terms_.begin()->second;
}

int MultiPoly::degree() const {
  if (terms_.empty()) return -1;
  // Terms are graded-descending, so the first term carries the total degree.
  return terms_.begin()->first.degree();
}

std::set<Sym> MultiPoly::symbols() const {
  std::set<Sym> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [s, e] : m.factors()) out.insert(s);
  return out;
}

void MultiPoly::add_term(const Monomial& m, const BigInt& coef) {
  if (coef == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0) terms_.erase(it);
  }
}

MultiPoly MultiPoly::operator+(const MultiPoly& other) const {
  MultiPoly out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, c);
  return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& other) const {
  MultiPoly out = *this;
  for (const auto& [m, c] : other.terms_) out.add_term(m, -c);
  return out;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& other) const {
  MultiPoly out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : other.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

MultiPoly MultiPoly::pow(int exponent) const {
  if (exponent < 0) throw InputError("negative polynomial exponent");
  MultiPoly out = MultiPoly::constant(1);
  for (int i = 0; i < exponent; ++i) out = out * (*this);
  return out;
}

Rational MultiPoly::evaluate(const ParamPoint& point) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational term(c);
    for (const auto& [s, e] : m.factors()) {
      auto it = point.find(s);
      if (it == point.end())
        throw InputError("evaluate: no assignment for symbol " + s.name());
      for (int i = 0; i < e; ++i) term *= it->second;
    }
    total += term;
  }
  return total;
}

double MultiPoly::evaluate_double(const ParamPointD& point) const {
  double total = 0;
  for (const auto& [m, c] : terms_) {
    double term = to_double(Rational(c));
    for (const auto& [s, e] : m.factors()) {
      auto it = point.find(s);
      if (it == point.end())
        throw InputError("evaluate: no assignment for symbol " + s.name());
      for (int i = 0; i < e; ++i) term *= it->second;
    }
    total += term;
  }
  return total;
}

MultiPoly MultiPoly::differentiate(Sym s) const {
  MultiPoly out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [sym, e] : m.factors()) {
      if (sym != s) continue;
      Monomial rest;
      for (const auto& [s2, e2] : m.factors()) {
        if (s2 == s) {
          if (e2 > 1) rest = rest * Monomial::var(s2, e2 - 1);
        } else {
          rest = rest * Monomial::var(s2, e2);
        }
      }
      out.add_term(rest, c * e);
      break;
    }
  }
  return out;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += c.str();
    for (const auto& [s, e] : m.factors()) {
      out += "*" + s.name();
      if (e >= 2) out += "^" + std::to_string(e);
    }
  }
  return out;
}

MultiPoly elementary_symmetric(int k, const std::vector<Sym>& symbols) {
  if (k < 0 || k > static_cast<int>(symbols.size()))
    throw InputError("elementary_symmetric: k out of range");
  std::vector<MultiPoly> e(static_cast<std::size_t>(k) + 1);
  e[0] = MultiPoly::constant(1);
  int seen = 0;
  for (Sym s : symbols) {
    ++seen;
    MultiPoly x = MultiPoly::variable(s);
    for (int j = std::min(k, seen); j >= 1; --j) e[j] = e[j] + x * e[j - 1];
  }
  return e[k];
}

SymbolicMatrix SymbolicMatrix::zero(int n) {
  SymbolicMatrix m;
  m.n = n;
  m.entries.assign(static_cast<std::size_t>(n) * n, MultiPoly::zero());
  return m;
}

MultiPoly& SymbolicMatrix::at(int i, int j) {
  return entries.at(static_cast<std::size_t>(i - 1) * n + (j - 1));
}

const MultiPoly& SymbolicMatrix::at(int i, int j) const {
  return entries.at(static_cast<std::size_t>(i - 1) * n + (j - 1));
}

}  // namespace lcm
