#include "grabforest/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

namespace grabforest {

double EmpiricalMeasure::proportion(const std::string& key) const {
  if (total == 0) return 0.0;
  auto it = counts.find(key);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

std::map<std::string, double> EmpiricalMeasure::proportions() const {
  std::map<std::string, double> out;
  for (const auto& [key, c] : counts) out[key] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

EmpiricalMeasure empirical_measure(const PlanarForest& forest) {
  EmpiricalMeasure m;
  for (std::size_t i = 0; i < forest.tree_count(); ++i) {
    const auto ds = forest.tree_outdegrees(i);
    std::string key = "(";
    for (std::size_t j = 0; j < ds.size(); ++j) {
      if (j) key += ',';
      key += std::to_string(ds[j]);
    }
    key += ')';
    m.add(key);
  }
  return m;
}

EmpiricalMeasure empirical_measure(const LabeledForest& terminal) {
  return empirical_measure(shape_of(terminal));
}

std::size_t count_matching_trees(const PlanarForest& forest, const PlanarTree& tree) {
  const auto want = tree.outdegrees();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < forest.tree_count(); ++i) {
    const auto got = forest.tree_outdegrees(i);
    if (got.size() == want.size() && std::equal(got.begin(), got.end(), want.begin())) ++hits;
  }
  return hits;
}

double chi_square_upper_tail(double statistic, std::size_t dof) {
  if (statistic <= 0.0) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

ChiSquareResult pearson(const std::vector<std::pair<double, double>>& cells) {
  ChiSquareResult r;
  r.cells = cells.size();
  r.dof = cells.size() - 1;
  for (const auto& [o, e] : cells) r.statistic += (o - e) * (o - e) / e;
  r.p_value = chi_square_upper_tail(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table) {
  std::vector<double> rows, cols;
  std::vector<std::size_t> keep_rows, keep_cols;
  const std::size_t ncols = table.empty() ? 0 : table.front().size();
  std::vector<double> col_sum(ncols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < ncols; ++j) {
      s += static_cast<double>(table[i][j]);
      col_sum[j] += static_cast<double>(table[i][j]);
    }
    if (s > 0.0) {
      keep_rows.push_back(i);
      rows.push_back(s);
    }
    total += s;
  }
  for (std::size_t j = 0; j < ncols; ++j) {
    if (col_sum[j] > 0.0) {
      keep_cols.push_back(j);
      cols.push_back(col_sum[j]);
    }
  }
  if (keep_rows.size() < 2 || keep_cols.size() < 2) {
    throw DegenerateCells("independence test needs at least a 2x2 table");
  }
  ChiSquareResult r;
  r.cells = keep_rows.size() * keep_cols.size();
  r.dof = (keep_rows.size() - 1) * (keep_cols.size() - 1);
  for (std::size_t a = 0; a < keep_rows.size(); ++a) {
    for (std::size_t b = 0; b < keep_cols.size(); ++b) {
      const double e = rows[a] * cols[b] / total;
      const double o = static_cast<double>(table[keep_rows[a]][keep_cols[b]]);
      r.statistic += (o - e) * (o - e) / e;
    }
  }
  r.p_value = chi_square_upper_tail(r.statistic, r.dof);
  return r;
}

}  // namespace grabforest
