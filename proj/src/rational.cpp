#include "grabforest/rational.hpp"

#include <cctype>

#include "grabforest/errors.hpp"

namespace grabforest {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num)) throw ParseError("bad numerator", 0);
    if (!all_digits(den)) throw ParseError("bad denominator", slash + 1);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator", slash + 1);
    Rational q(mpz_class(std::string(num), 10), d);
    q.canonicalize();
    return q;
  }
  auto dot = text.find('.');
  auto whole = text.substr(0, dot);
  std::string_view frac;
  if (dot != std::string_view::npos) frac = text.substr(dot + 1);
  if (whole.empty() && frac.empty()) throw ParseError("empty number", 0);
  if (!whole.empty() && !all_digits(whole)) throw ParseError("bad number", 0);
  if (!frac.empty() && !all_digits(frac)) throw ParseError("bad fraction digits", dot + 1);
  if (dot != std::string_view::npos && frac.empty()) throw ParseError("trailing dot", dot);
  mpz_class num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace grabforest
