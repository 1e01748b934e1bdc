#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace grabforest {

using Rational = mpq_class;

// Accepts "3", "1/2" and exact decimals such as "0.35" (= 7/20).
// Throws ParseError on malformed input.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

}  // namespace grabforest
