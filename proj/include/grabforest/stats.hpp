#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "grabforest/errors.hpp"
#include "grabforest/forest.hpp"

namespace grabforest {

// Counts of tree shapes keyed by text form.
struct EmpiricalMeasure {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const std::string& key, std::uint64_t count = 1) {
    counts[key] += count;
    total += count;
  }
  void merge(const EmpiricalMeasure& other) {
    for (const auto& [key, c] : other.counts) counts[key] += c;
    total += other.total;
  }
  double proportion(const std::string& key) const;
  std::map<std::string, double> proportions() const;
};

// One count per tree of the forest; total = number of trees.
EmpiricalMeasure empirical_measure(const PlanarForest& forest);
EmpiricalMeasure empirical_measure(const LabeledForest& terminal);

// Number of trees of `forest` identical to `tree`.
std::size_t count_matching_trees(const PlanarForest& forest, const PlanarTree& tree);

template <class K>
using FiniteLaw = std::map<K, double>;

// (1/2) sum |p - q| over the union of supports.
template <class K>
double tv_distance(const FiniteLaw<K>& p, const FiniteLaw<K>& q) {
  double acc = 0.0;
  auto it_p = p.begin();
  auto it_q = q.begin();
  while (it_p != p.end() || it_q != q.end()) {
    if (it_q == q.end() || (it_p != p.end() && it_p->first < it_q->first)) {
      acc += std::abs(it_p->second);
      ++it_p;
    } else if (it_p == p.end() || it_q->first < it_p->first) {
      acc += std::abs(it_q->second);
      ++it_q;
    } else {
      acc += std::abs(it_p->second - it_q->second);
      ++it_p;
      ++it_q;
    }
  }
  return 0.5 * acc;
}

template <class K>
FiniteLaw<K> normalize_counts(const std::map<K, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [key, c] : counts) total += c;
  FiniteLaw<K> out;
  for (const auto& [key, c] : counts) {
    out[key] = static_cast<double>(c) / static_cast<double>(total);
  }
  return out;
}

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t dof = 0;
  std::size_t cells = 0;
};

inline constexpr double kMinExpectedCount = 5.0;

// Upper tail of the chi-square distribution.
double chi_square_upper_tail(double statistic, std::size_t dof);

// Pearson goodness of fit from (observed, expected) cell pairs already
// pooled by the caller.
ChiSquareResult pearson(const std::vector<std::pair<double, double>>& cells);

// Goodness of fit of observed counts against an expected law. Cells with
// expected count below 5, observed keys absent from the law and any
// leftover expected mass form one tail cell; a tail still below 5 merges
// into the smallest kept cell. Throws DegenerateCells if fewer than two
// cells remain.
template <class K>
ChiSquareResult chi_square_test(const std::map<K, std::uint64_t>& observed,
                                const FiniteLaw<K>& expected, std::uint64_t total) {
  const double n = static_cast<double>(total);
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double kept_mass = 0.0;
  double kept_observed = 0.0;
  for (const auto& [key, p] : expected) {
    const double e = p * n;
    if (e < kMinExpectedCount) continue;
    auto it = observed.find(key);
    const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    cells.emplace_back(o, e);
    kept_mass += p;
    kept_observed += o;
  }
  const double tail_e = std::max(0.0, 1.0 - kept_mass) * n;
  const double tail_o = n - kept_observed;
  if (tail_e >= kMinExpectedCount) {
    cells.emplace_back(tail_o, tail_e);
  } else if (tail_e > 0.0 || tail_o > 0.0) {
    if (cells.empty()) throw DegenerateCells("no cell reaches the expected count of 5");
    auto smallest = cells.begin();
    for (auto it = cells.begin(); it != cells.end(); ++it) {
      if (it->second < smallest->second) smallest = it;
    }
    smallest->first += tail_o;
    smallest->second += tail_e;
  }
  if (cells.size() < 2) throw DegenerateCells("pooling leaves fewer than 2 cells");
  return pearson(cells);
}

// Pearson test of independence on a contingency table. Rows and columns
// with zero margin are dropped; dof = (r - 1)(c - 1).
ChiSquareResult chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table);

}  // namespace grabforest
