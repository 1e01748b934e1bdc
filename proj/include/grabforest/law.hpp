#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "grabforest/rational.hpp"

namespace grabforest {

using Degree = std::uint32_t;

enum class Criticality { subcritical, critical, supercritical };

std::string to_string(Criticality c);

// Finitely supported offspring law on the nonnegative integers.
//
// P is the probability representation: double for Monte Carlo paths,
// Rational for exact paths. The two never mix; convert explicitly with
// to_double().
template <class P>
class ReproductionLaw {
 public:
  struct Entry {
    Degree value;
    P prob;
    bool operator==(const Entry&) const = default;
  };

  // Drops zero-weight entries and sorts by value. Throws InvalidLaw on
  // negative weights, duplicate values or an empty support, NotNormalized
  // when the weights do not sum to one (exactly for Rational, within 1e-9
  // for double; double weights are then renormalized).
  explicit ReproductionLaw(std::vector<Entry> entries);

  static ReproductionLaw dirac(Degree value);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  Degree min_value() const { return entries_.front().value; }
  Degree max_value() const { return entries_.back().value; }

  // Zero outside the support.
  P prob(Degree value) const;
  P mean() const;
  Criticality criticality() const;

  ReproductionLaw<double> to_double() const;

  // "v:p,v:p,..." in the law text format.
  std::string to_string() const;

  bool operator==(const ReproductionLaw&) const = default;

 private:
  std::vector<Entry> entries_;
};

using FloatLaw = ReproductionLaw<double>;
using RationalLaw = ReproductionLaw<Rational>;

extern template class ReproductionLaw<double>;
extern template class ReproductionLaw<Rational>;

// Law text format "v:p,v:p,...". Whitespace-insensitive. Probabilities may
// be decimals or fractions in either mode; rational mode keeps them exact.
FloatLaw parse_float_law(std::string_view text);
RationalLaw parse_rational_law(std::string_view text);

// gcd of the differences between support points; 0 for a single point.
Degree support_period(const std::vector<Degree>& support);

template <class P>
std::vector<Degree> support_of(const ReproductionLaw<P>& law) {
  std::vector<Degree> out;
  out.reserve(law.support_size());
  for (const auto& e : law.entries()) out.push_back(e.value);
  return out;
}

}  // namespace grabforest
