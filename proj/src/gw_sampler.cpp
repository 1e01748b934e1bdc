#include "grabforest/gw_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grabforest/errors.hpp"

namespace grabforest {

std::optional<PlanarTree> try_sample_tree(const DiscreteSampler& offspring, Rng& rng,
                                          std::size_t cap, std::size_t* partial_size) {
  std::vector<Degree> degrees;
  std::size_t pending = 1;
  while (pending > 0) {
    if (degrees.size() >= cap) {
      if (partial_size) *partial_size = degrees.size();
      return std::nullopt;
    }
    const Degree d = offspring(rng);
    degrees.push_back(d);
    pending += d;
    --pending;
  }
  if (partial_size) *partial_size = degrees.size();
  return PlanarTree(std::move(degrees));
}

PlanarTree sample_tree(const FloatLaw& law, Rng& rng, std::size_t cap) {
  if (cap == 0) throw OutOfRange("vertex budget must be positive");
  std::size_t partial = 0;
  auto t = try_sample_tree(DiscreteSampler(law), rng, cap, &partial);
  if (!t) {
    throw BudgetExceeded("tree reached the budget of " + std::to_string(cap) + " vertices",
                         partial);
  }
  return std::move(*t);
}

double extinction_probability(const FloatLaw& law) {
  if (law.mean() <= 1.0) return 1.0;
  double q = 0.0;
  for (int it = 0; it < 1'000'000; ++it) {
    double f = 0.0;
    for (const auto& e : law.entries()) f += e.prob * std::pow(q, e.value);
    if (std::abs(f - q) < 1e-16) return f;
    q = f;
  }
  return q;
}

namespace {

std::size_t walk_range(std::size_t n, Degree max_value, std::optional<std::size_t> max_sum) {
  const std::size_t full = n * static_cast<std::size_t>(max_value);
  return max_sum ? std::min(*max_sum, full) : full;
}

template <class P, bool kParallel>
std::vector<P> convolution_power(const ReproductionLaw<P>& law, std::size_t n,
                                 std::optional<std::size_t> max_sum) {
  const std::size_t top = walk_range(n, law.max_value(), max_sum);
  const auto& entries = law.entries();
  std::vector<P> cur(1, P(1));
  std::vector<P> next;
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t len = std::min(top, step * law.max_value()) + 1;
    next.assign(len, P(0));
    const auto cur_len = static_cast<std::ptrdiff_t>(cur.size());
    const auto out_len = static_cast<std::ptrdiff_t>(len);
    if constexpr (kParallel) {
#pragma omp parallel for schedule(static) if (out_len > 2048)
      for (std::ptrdiff_t s = 0; s < out_len; ++s) {
        P acc = 0;
        for (const auto& e : entries) {
          const auto from = s - static_cast<std::ptrdiff_t>(e.value);
          if (from < 0) break;
          if (from < cur_len) acc += e.prob * cur[from];
        }
        next[s] = acc;
      }
    } else {
      for (std::ptrdiff_t s = 0; s < out_len; ++s) {
        P acc = 0;
        for (const auto& e : entries) {
          const auto from = s - static_cast<std::ptrdiff_t>(e.value);
          if (from < 0) break;
          if (from < cur_len) acc += e.prob * cur[from];
        }
        next[s] = acc;
      }
    }
    cur.swap(next);
  }
  if (max_sum && cur.size() < *max_sum + 1) cur.resize(*max_sum + 1, P(0));
  return cur;
}

}  // namespace

std::vector<double> walk_pmf(const FloatLaw& law, std::size_t n,
                             std::optional<std::size_t> max_sum) {
  return convolution_power<double, true>(law, n, max_sum);
}

std::vector<double> walk_pmf_serial(const FloatLaw& law, std::size_t n,
                                    std::optional<std::size_t> max_sum) {
  return convolution_power<double, false>(law, n, max_sum);
}

std::vector<Rational> walk_pmf(const RationalLaw& law, std::size_t n,
                               std::optional<std::size_t> max_sum) {
  return convolution_power<Rational, false>(law, n, max_sum);
}

namespace {

void check_kn(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw OutOfRange("need 1 <= k <= n, got k = " + std::to_string(k) +
                     ", n = " + std::to_string(n));
  }
}

}  // namespace

template <class P>
P first_passage_pmf(const ReproductionLaw<P>& law, std::size_t k, std::size_t n) {
  check_kn(k, n);
  auto pmf = walk_pmf(law, n, n - k);
  return P(static_cast<unsigned long>(k)) / P(static_cast<unsigned long>(n)) * pmf[n - k];
}

template <class P>
P first_passage_pmf_direct(const ReproductionLaw<P>& law, std::size_t k, std::size_t n) {
  check_kn(k, n);
  // alive[h]: probability of height h = S_j + k >= 1 with no earlier visit
  // to 0. Heights above n - j can no longer reach 0 by step n.
  std::vector<P> alive(n + 2, P(0));
  if (k > n) return P(0);
  alive[k] = 1;
  P hit = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    std::vector<P> next(n + 2, P(0));
    const std::size_t ceiling = n - j;
    for (std::size_t h = 1; h < alive.size(); ++h) {
      if (alive[h] == 0) continue;
      for (const auto& e : law.entries()) {
        const std::size_t h2 = h + e.value - 1;
        if (h2 == 0) {
          if (j == n) hit += alive[h] * e.prob;
        } else if (h2 <= ceiling) {
          next[h2] += alive[h] * e.prob;
        }
      }
    }
    alive.swap(next);
  }
  return hit;
}

template double first_passage_pmf(const FloatLaw&, std::size_t, std::size_t);
template Rational first_passage_pmf(const RationalLaw&, std::size_t, std::size_t);
template double first_passage_pmf_direct(const FloatLaw&, std::size_t, std::size_t);
template Rational first_passage_pmf_direct(const RationalLaw&, std::size_t, std::size_t);

std::vector<std::size_t> valid_shifts(std::span<const Degree> outdegrees, std::size_t k) {
  const std::size_t n = outdegrees.size();
  std::size_t total = 0;
  for (Degree d : outdegrees) total += d;
  if (n == 0 || k < 1 || k > n || total != n - k) {
    throw BadSum("outdegrees sum to " + std::to_string(total) + ", expected n - k = " +
                 std::to_string(n) + " - " + std::to_string(k));
  }
  LukasiewiczWalk walk(outdegrees);
  const auto sums = walk.partial_sums();
  const auto lk = static_cast<std::int64_t>(k);

  // suffix_min[m] = min S over [m, n - 1].
  std::vector<std::int64_t> suffix_min(n + 1, std::numeric_limits<std::int64_t>::max());
  for (std::size_t m = n; m-- > 1;) suffix_min[m] = std::min(sums[m], suffix_min[m + 1]);

  std::vector<std::size_t> shifts;
  std::int64_t prefix_min = std::numeric_limits<std::int64_t>::max();
  for (std::size_t start = 0; start < n; ++start) {
    // The rotation starting at `start` stays above -k before its end iff
    // S_start is a strict new minimum and no later S_m (m < n) drops to
    // S_start - k.
    const bool new_min = start == 0 || sums[start] < prefix_min;
    if (new_min && suffix_min[start + 1] > sums[start] - lk) shifts.push_back((n - start) % n);
    prefix_min = std::min(prefix_min, sums[start]);
  }
  std::sort(shifts.begin(), shifts.end());
  return shifts;
}

SumConditionedSampler::SumConditionedSampler(const FloatLaw& law, std::size_t n,
                                             std::size_t lo, std::size_t hi)
    : law_(law), draw_(law), n_(n), lo_(lo), hi_(hi) {
  if (lo > hi) throw Infeasible("empty sum window");
  auto pmf = walk_pmf(law, n, hi);
  for (std::size_t s = lo; s <= hi && s < pmf.size(); ++s) acceptance_ += pmf[s];
  if (!(acceptance_ > 0.0)) {
    throw Infeasible("sum of " + std::to_string(n) + " draws cannot land in [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  rejection_ = acceptance_ >= kRejectionThreshold;
  if (rejection_) return;

  rows_.reserve(n + 1);
  rows_.push_back(std::vector<double>(hi + 1, 0.0));
  rows_[0][0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const auto& prev = rows_.back();
    std::vector<double> row(hi + 1, 0.0);
    double mass = 0.0;
    for (std::size_t s = 0; s <= hi; ++s) {
      double acc = 0.0;
      for (const auto& e : law.entries()) {
        if (e.value > s) break;
        acc += e.prob * prev[s - e.value];
      }
      row[s] = acc;
      mass += acc;
    }
    for (auto& x : row) x /= mass;
    rows_.push_back(std::move(row));
  }
}

std::vector<Degree> SumConditionedSampler::operator()(Rng& rng) const {
  if (!rejection_) return sample_backward(rng);
  std::vector<Degree> out(n_);
  while (true) {
    std::size_t total = 0;
    for (auto& d : out) {
      d = draw_(rng);
      total += d;
    }
    if (total >= lo_ && total <= hi_) return out;
  }
}

namespace {

template <class Weight>
std::size_t pick_weighted(Rng& rng, std::size_t count, Weight&& weight) {
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) total += weight(i);
  double u = rng.uniform01() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double w = weight(i);
    if (w <= 0.0) continue;
    last_positive = i;
    if (u < w) return i;
    u -= w;
  }
  return last_positive;
}

}  // namespace

std::vector<Degree> SumConditionedSampler::sample_backward(Rng& rng) const {
  std::vector<Degree> out(n_);
  const auto& final_row = rows_[n_];
  std::size_t s = lo_ + pick_weighted(rng, hi_ - lo_ + 1,
                                      [&](std::size_t i) { return final_row[lo_ + i]; });
  const auto& entries = law_.entries();
  for (std::size_t j = n_; j >= 1; --j) {
    const auto& prev = rows_[j - 1];
    const auto choice = pick_weighted(rng, entries.size(), [&](std::size_t i) {
      const auto v = entries[i].value;
      return v > s ? 0.0 : entries[i].prob * prev[s - v];
    });
    out[j - 1] = entries[choice].value;
    s -= entries[choice].value;
  }
  return out;
}

namespace {

std::size_t checked_k(const ConditionedForestSpec& spec) {
  if (spec.k < 1 || spec.k > spec.n) {
    throw Infeasible("need 1 <= k <= n, got k = " + std::to_string(spec.k) +
                     ", n = " + std::to_string(spec.n));
  }
  return spec.k;
}

}  // namespace

ConditionedForestSampler::ConditionedForestSampler(const ConditionedForestSpec& spec)
    : k_(checked_k(spec)), sequences_(spec.law, spec.n, spec.n - spec.k, spec.n - spec.k) {}

PlanarForest ConditionedForestSampler::operator()(Rng& rng) const {
  auto seq = sequences_(rng);
  const auto shifts = valid_shifts(seq, k_);
  const auto r = shifts[rng.uniform_below(shifts.size())];
  const auto start = (seq.size() - r) % seq.size();
  std::rotate(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(start), seq.end());
  return parse_forest(seq, k_);
}

PlanarForest sample_forest_conditioned(const ConditionedForestSpec& spec, Rng& rng) {
  return ConditionedForestSampler(spec)(rng);
}

namespace {

std::vector<double> tilted_weights(const FloatLaw& law, double log_scale) {
  std::vector<double> logw;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& e : law.entries()) {
    logw.push_back(std::log(e.prob) + e.value * log_scale);
    top = std::max(top, logw.back());
  }
  double total = 0.0;
  for (auto& w : logw) {
    w = std::exp(w - top);
    total += w;
  }
  for (auto& w : logw) w /= total;
  return logw;
}

double tilted_mean(const FloatLaw& law, double log_scale) {
  const auto w = tilted_weights(law, log_scale);
  double mean = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) mean += law.entries()[i].value * w[i];
  return mean;
}

}  // namespace

TiltResult exponential_tilt(const FloatLaw& law, double target_mean) {
  if (law.support_size() < 2) throw Unreachable("tilting needs at least two support points");
  if (!(target_mean > law.min_value() && target_mean < law.max_value())) {
    throw Unreachable("target mean must lie strictly between " +
                      std::to_string(law.min_value()) + " and " +
                      std::to_string(law.max_value()));
  }
  double lo = -60.0, hi = 60.0;
  if (tilted_mean(law, lo) > target_mean || tilted_mean(law, hi) < target_mean) {
    throw Unreachable("target mean outside the tilt family's range on [-60, 60]");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tilted_mean(law, mid) < target_mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double log_scale = 0.5 * (lo + hi);
  const auto w = tilted_weights(law, log_scale);
  std::vector<FloatLaw::Entry> entries;
  for (std::size_t i = 0; i < w.size(); ++i) entries.push_back({law.entries()[i].value, w[i]});
  FloatLaw tilted(std::move(entries));
  if (std::abs(tilted.mean() - target_mean) > 1e-10) {
    throw Unreachable("bisection did not reach the target mean within 1e-10");
  }
  return {std::move(tilted), std::exp(log_scale)};
}

template <class P>
ReproductionLaw<P> size_biased(const ReproductionLaw<P>& law) {
  const P mean = law.mean();
  if (mean == 0) throw ZeroMean("size-biasing needs a positive mean");
  std::vector<typename ReproductionLaw<P>::Entry> entries;
  for (const auto& e : law.entries()) {
    if (e.value == 0) continue;
    entries.push_back({e.value - 1, P(e.value) * e.prob / mean});
  }
  return ReproductionLaw<P>(std::move(entries));
}

template <class P>
P molloy_reed_criterion(const ReproductionLaw<P>& law) {
  P total = 0;
  for (const auto& e : law.entries()) {
    const P v = P(e.value);
    total += v * (v - P(2)) * e.prob;
  }
  return total;
}

template FloatLaw size_biased(const FloatLaw&);
template RationalLaw size_biased(const RationalLaw&);
template double molloy_reed_criterion(const FloatLaw&);
template Rational molloy_reed_criterion(const RationalLaw&);

}  // namespace grabforest
