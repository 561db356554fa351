#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace relic
{

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "3", "-2/5", "0.25", "1e-3" into an exact rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// "7", "-3/4"
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

Integer floor(const Rational& q);
Integer ceil(const Rational& q);
bool is_integral(const Rational& q);

Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);

inline int sign(const Rational& q) { return sgn(q); }

} // namespace relic
