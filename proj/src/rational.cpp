#include "lcm/rational.hpp"

#include "lcm/errors.hpp"

namespace lcm {

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw InputError("empty rational literal");
  try {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw InputError("rational literal with zero denominator: " + text);
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw InputError("malformed rational literal: " + text);
  }
}

}  // namespace lcm
