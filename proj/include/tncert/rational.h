#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tncert {

using Rational = mpq_class;

// Accepts "p", "-p", "p/q". Throws Error(kParseError).
Rational parse_rational(std::string_view text);

// Canonical "p/q" (or "p" for integers).
std::string to_string(const Rational& q);

double to_double(const Rational& q);

// Nearest rational with denominator 2^bits (ties away from zero).
Rational round_to_dyadic(double x, int bits);

// Largest rational with denominator 2^bits that is <= x.
Rational floor_to_dyadic(double x, int bits);

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace tncert
