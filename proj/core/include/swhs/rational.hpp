#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <string_view>

namespace swhs {

// Exact rational scalar used for all exponent algebra. Every finite decimal
// or scientific literal is a rational, so config values round-trip exactly.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Hoelder conjugate p/(p-1); requires p != 1.
Rational conjugate_exponent(const Rational& p);

// Accepts "a/b", integer, decimal and scientific forms ("3/2", "-7", "0.25",
// "1e-3", "2.5e2"). Returns nullopt on anything else.
std::optional<Rational> parse_rational(std::string_view text);

std::string to_string(const Rational& x);

}  // namespace swhs
