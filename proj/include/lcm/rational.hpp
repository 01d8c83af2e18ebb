#ifndef LCM_RATIONAL_HPP
#define LCM_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace lcm {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational arithmetic. cpp_rational keeps values canonical
// (gcd(num, den) = 1, den > 0) after every operation.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.template convert_to<double>(); }

// "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& q);

// Accepts the to_string formats. Throws InputError on anything else.
Rational parse_rational(const std::string& text);

}  // namespace lcm

#endif
