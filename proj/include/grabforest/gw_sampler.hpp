#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "grabforest/forest.hpp"
#include "grabforest/law.hpp"
#include "grabforest/random.hpp"

namespace grabforest {

// ---- Galton-Watson trees -------------------------------------------------

// Depth-first generation of one GW tree. Returns nullopt when the tree
// reaches `cap` vertices with individuals still unexplored; `partial_size`
// (if given) receives the number of vertices generated.
std::optional<PlanarTree> try_sample_tree(const DiscreteSampler& offspring, Rng& rng,
                                          std::size_t cap,
                                          std::size_t* partial_size = nullptr);

// Same, but throws BudgetExceeded instead of returning nullopt.
PlanarTree sample_tree(const FloatLaw& law, Rng& rng, std::size_t cap);

// Extinction probability: smallest root of q = sum_l mu(l) q^l in [0, 1].
double extinction_probability(const FloatLaw& law);

// ---- Lukasiewicz walk distributions -------------------------------------

// P(xi_1 + ... + xi_n = s) for s = 0..max_sum (default n * max support).
// The float overload runs the convolution with OpenMP; walk_pmf_serial is
// the sequential reference and produces bit-identical output.
std::vector<double> walk_pmf(const FloatLaw& law, std::size_t n,
                             std::optional<std::size_t> max_sum = std::nullopt);
std::vector<double> walk_pmf_serial(const FloatLaw& law, std::size_t n,
                                    std::optional<std::size_t> max_sum = std::nullopt);
std::vector<Rational> walk_pmf(const RationalLaw& law, std::size_t n,
                               std::optional<std::size_t> max_sum = std::nullopt);

// P(T_k = n) = (k / n) P(S_n = n - k). Requires 1 <= k <= n.
template <class P>
P first_passage_pmf(const ReproductionLaw<P>& law, std::size_t k, std::size_t n);

// P(T_k = n) by dynamic programming on the walk killed at -k. Independent
// of the convolution route above.
template <class P>
P first_passage_pmf_direct(const ReproductionLaw<P>& law, std::size_t k, std::size_t n);

extern template double first_passage_pmf(const FloatLaw&, std::size_t, std::size_t);
extern template Rational first_passage_pmf(const RationalLaw&, std::size_t, std::size_t);
extern template double first_passage_pmf_direct(const FloatLaw&, std::size_t, std::size_t);
extern template Rational first_passage_pmf_direct(const RationalLaw&, std::size_t, std::size_t);

// ---- Cyclic shifts and conditioned forests ------------------------

// Shifts r such that the sequence rotated right by r (entry i moves to
// position (i + r) mod n) first hits -k at its final index. Ascending. Always exactly k of them. Throws BadSum if the degrees do
// not sum to n - k.
std::vector<std::size_t> valid_shifts(std::span<const Degree> outdegrees, std::size_t k);

// Acceptance probability below which conditioned sequences switch from
// rejection to backward sampling through the convolution table.
inline constexpr double kRejectionThreshold = 1e-3;

// i.i.d. draws from `law`, conditioned on their sum lying in [lo, hi].
// Immutable after construction and safe to share between threads.
class SumConditionedSampler {
 public:
  // Throws Infeasible when the event has probability zero.
  SumConditionedSampler(const FloatLaw& law, std::size_t n, std::size_t lo, std::size_t hi);

  double acceptance() const { return acceptance_; }
  bool uses_rejection() const { return rejection_; }
  std::size_t length() const { return n_; }

  std::vector<Degree> operator()(Rng& rng) const;

 private:
  std::vector<Degree> sample_backward(Rng& rng) const;

  FloatLaw law_;
  DiscreteSampler draw_;
  std::size_t n_, lo_, hi_;
  double acceptance_ = 0.0;
  bool rejection_ = true;
  // rows_[j][s] proportional to P(S_j = s), s <= hi; each row normalized.
  std::vector<std::vector<double>> rows_;
};

struct ConditionedForestSpec {
  FloatLaw law;
  std::size_t k;
  std::size_t n;
};

// GW forest with k ancestors conditioned on total size n: a conditioned
// i.i.d. outdegree sequence, rotated by a uniformly chosen valid shift.
class ConditionedForestSampler {
 public:
  // Throws Infeasible if P(T_k = n) = 0 or k is not in 1..n.
  explicit ConditionedForestSampler(const ConditionedForestSpec& spec);

  PlanarForest operator()(Rng& rng) const;
  const SumConditionedSampler& sequences() const { return sequences_; }

 private:
  std::size_t k_;
  SumConditionedSampler sequences_;
};

PlanarForest sample_forest_conditioned(const ConditionedForestSpec& spec, Rng& rng);

// ---- Law transforms ------------------------------------------------------

struct TiltResult {
  FloatLaw law;
  double scale;  // weight ratio per unit of offspring
};

// tilted(l) = mu(l) s^l / Z(s) with mean(tilted) = target_mean within
// 1e-10, found by bisection on log(s) over [-60, 60]. Throws Unreachable
// unless min support < target < max support.
TiltResult exponential_tilt(const FloatLaw& law, double target_mean);

// biased(l) = (l + 1) mu(l + 1) / m. Throws ZeroMean if m = 0.
template <class P>
ReproductionLaw<P> size_biased(const ReproductionLaw<P>& law);

// sum_l l (l - 2) mu(l).
template <class P>
P molloy_reed_criterion(const ReproductionLaw<P>& law);

extern template FloatLaw size_biased(const FloatLaw&);
extern template RationalLaw size_biased(const RationalLaw&);
extern template double molloy_reed_criterion(const FloatLaw&);
extern template Rational molloy_reed_criterion(const RationalLaw&);

}  // namespace grabforest
