#include "grabforest/law.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "grabforest/errors.hpp"

namespace grabforest {

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
  }
  return "?";
}

namespace {

constexpr double kParseTolerance = 1e-9;

bool is_zero(double p) { return p == 0.0; }
bool is_zero(const Rational& p) { return p == 0; }
bool is_negative(double p) { return p < 0.0 || std::isnan(p); }
bool is_negative(const Rational& p) { return p < 0; }

std::string format_prob(double p) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, p);
  return std::string(buf, res.ptr);
}
std::string format_prob(const Rational& p) { return p.get_str(); }

}  // namespace

template <class P>
ReproductionLaw<P>::ReproductionLaw(std::vector<Entry> entries) {
  for (auto& e : entries) {
    if (is_negative(e.prob)) {
      throw InvalidLaw("negative weight at value " + std::to_string(e.value));
    }
    if (!is_zero(e.prob)) entries_.push_back(std::move(e));
  }
  if (entries_.empty()) throw InvalidLaw("law has empty support");
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.value < b.value; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].value == entries_[i - 1].value) {
      throw InvalidLaw("duplicate value " + std::to_string(entries_[i].value));
    }
  }
  P total = 0;
  for (const auto& e : entries_) total += e.prob;
  if constexpr (std::is_same_v<P, double>) {
    if (std::abs(total - 1.0) > kParseTolerance) {
      throw NotNormalized("weights sum to " + format_prob(total));
    }
    for (auto& e : entries_) e.prob /= total;
  } else {
    if (total != 1) throw NotNormalized("weights sum to " + total.get_str());
  }
}

template <class P>
ReproductionLaw<P> ReproductionLaw<P>::dirac(Degree value) {
  return ReproductionLaw({{value, P(1)}});
}

template <class P>
P ReproductionLaw<P>::prob(Degree value) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), value,
      [](const Entry& e, Degree v) { return e.value < v; });
  if (it == entries_.end() || it->value != value) return P(0);
  return it->prob;
}

template <class P>
P ReproductionLaw<P>::mean() const {
  P m = 0;
  for (const auto& e : entries_) m += P(e.value) * e.prob;
  return m;
}

template <class P>
Criticality ReproductionLaw<P>::criticality() const {
  P m = mean();
  if constexpr (std::is_same_v<P, double>) {
    if (std::abs(m - 1.0) <= 1e-12) return Criticality::critical;
    return m < 1.0 ? Criticality::subcritical : Criticality::supercritical;
  } else {
    if (m == 1) return Criticality::critical;
    return m < 1 ? Criticality::subcritical : Criticality::supercritical;
  }
}

template <class P>
ReproductionLaw<double> ReproductionLaw<P>::to_double() const {
  std::vector<ReproductionLaw<double>::Entry> out;
  for (const auto& e : entries_) out.push_back({e.value, grabforest::to_double(e.prob)});
  return ReproductionLaw<double>(std::move(out));
}

template <class P>
std::string ReproductionLaw<P>::to_string() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out += ',';
    out += std::to_string(e.value);
    out += ':';
    out += format_prob(e.prob);
  }
  return out;
}

template class ReproductionLaw<double>;
template class ReproductionLaw<Rational>;

namespace {

std::string strip_spaces(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  return s;
}

struct RawEntry {
  Degree value;
  std::string prob;
  std::size_t prob_pos;
};

std::vector<RawEntry> split_law(const std::string& s) {
  if (s.empty()) throw ParseError("empty law", 0);
  std::vector<RawEntry> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    auto item = std::string_view(s).substr(pos, comma - pos);
    auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'v:p'", pos);
    Degree v = 0;
    auto vs = item.substr(0, colon);
    auto [ptr, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), v);
    if (vs.empty() || ec != std::errc() || ptr != vs.data() + vs.size()) {
      throw ParseError("bad value", pos);
    }
    out.push_back({v, std::string(item.substr(colon + 1)), pos + colon + 1});
    pos = comma + 1;
  }
  return out;
}

}  // namespace

RationalLaw parse_rational_law(std::string_view text) {
  std::vector<RationalLaw::Entry> entries;
  for (const auto& raw : split_law(strip_spaces(text))) {
    try {
      entries.push_back({raw.value, parse_rational(raw.prob)});
    } catch (const ParseError& e) {
      throw ParseError("bad probability '" + raw.prob + "'", raw.prob_pos + e.position());
    }
  }
  return RationalLaw(std::move(entries));
}

FloatLaw parse_float_law(std::string_view text) {
  std::vector<FloatLaw::Entry> entries;
  for (const auto& raw : split_law(strip_spaces(text))) {
    double p = 0.0;
    const char* first = raw.prob.data();
    const char* last = first + raw.prob.size();
    auto [ptr, ec] = std::from_chars(first, last, p);
    if (ec != std::errc() || ptr != last) {
      // Fractions are accepted in float mode too.
      try {
        p = parse_rational(raw.prob).get_d();
      } catch (const ParseError& e) {
        throw ParseError("bad probability '" + raw.prob + "'", raw.prob_pos + e.position());
      }
    }
    entries.push_back({raw.value, p});
  }
  return FloatLaw(std::move(entries));
}

Degree support_period(const std::vector<Degree>& support) {
  Degree g = 0;
  for (std::size_t i = 1; i < support.size(); ++i) {
    g = std::gcd(g, support[i] - support[0]);
  }
  return g;
}

}  // namespace grabforest
