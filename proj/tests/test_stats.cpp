#include <doctest.h>

#include "grabforest/errors.hpp"
#include "grabforest/forest.hpp"
#include "grabforest/stats.hpp"

using namespace grabforest;

TEST_CASE("empirical measure") {
  const LabeledForest isolated{parse_forest_text("(0|0|0)"), {1, 2, 3}, {0, 0, 0}};
  const EmpiricalMeasure a = empirical_measure(isolated);
  CHECK(a.total == 3);
  CHECK(a.counts == std::map<std::string, std::uint64_t>{{"(0)", 3}});

  const LabeledForest sample{parse_forest_text("(1,2,1,0,0|1,0)"),
                             {7, 6, 5, 1, 2, 4, 3},
                             {0, 2, 1, 3, 4, 0, 5}};
  const EmpiricalMeasure b = empirical_measure(sample);
  CHECK(b.total == 2);
  CHECK(b.proportion("(1,2,1,0,0)") == 0.5);
  CHECK(b.proportion("(1,0)") == 0.5);
  CHECK(b.proportion("(0)") == 0.0);

  EmpiricalMeasure merged = a;
  merged.merge(b);
  double sum = 0.0;
  for (const auto& [key, p] : merged.proportions()) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(merged.total == 5);
  CHECK(count_matching_trees(sample.shape, PlanarTree({1, 0})) == 1);
}

TEST_CASE("total variation") {
  const FiniteLaw<std::string> p{{"a", 1.0}};
  const FiniteLaw<std::string> q{{"a", 0.5}, {"b", 0.5}};
  const FiniteLaw<std::string> r{{"c", 1.0}};
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(p, r) == 1.0);
  CHECK(tv_distance(p, q) == 0.5);
  CHECK(tv_distance(p, q) == tv_distance(q, p));
  CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r));
  CHECK(normalize_counts(std::map<int, std::uint64_t>{{1, 1}, {2, 3}}) ==
        FiniteLaw<int>{{1, 0.25}, {2, 0.75}});
}

TEST_CASE("chi-square") {
  const FiniteLaw<int> uniform{{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}};
  const auto res = chi_square_test(std::map<int, std::uint64_t>{{0, 30}, {1, 20}, {2, 25}, {3, 25}},
                                   uniform, 100);
  CHECK(res.statistic == doctest::Approx(2.0));
  CHECK(res.dof == 3);
  CHECK(res.p_value == doctest::Approx(0.5724067).epsilon(1e-6));

  const auto exact = chi_square_test(
      std::map<int, std::uint64_t>{{0, 25}, {1, 25}, {2, 25}, {3, 25}}, uniform, 100);
  CHECK(exact.statistic == 0.0);
  CHECK(exact.p_value == 1.0);

  // Permuting cells leaves the statistic unchanged.
  const auto permuted = chi_square_test(
      std::map<int, std::uint64_t>{{0, 25}, {1, 25}, {2, 20}, {3, 30}}, uniform, 100);
  CHECK(permuted.statistic == doctest::Approx(res.statistic));

  CHECK_THROWS_AS(chi_square_test(std::map<int, std::uint64_t>{{0, 100}},
                                  FiniteLaw<int>{{0, 1.0}}, 100),
                  DegenerateCells);
}

TEST_CASE("chi-square pooling") {
  // Cells 2 and 3 expect 2 each and pool into one tail cell of 4, which is
  // merged into the smallest kept cell.
  const FiniteLaw<int> law{{0, 0.5}, {1, 0.46}, {2, 0.02}, {3, 0.02}};
  const auto res = chi_square_test(
      std::map<int, std::uint64_t>{{0, 50}, {1, 46}, {2, 2}, {3, 2}}, law, 100);
  CHECK(res.cells == 2);
  CHECK(res.statistic == doctest::Approx(0.0));
  // Observed keys outside the expected law join the tail, which here has no
  // expected mass and is merged into the smallest kept cell.
  const auto stray = chi_square_test(
      std::map<int, std::uint64_t>{{0, 40}, {1, 40}, {9, 20}}, FiniteLaw<int>{{0, 0.5}, {1, 0.5}},
      100);
  CHECK(stray.statistic == doctest::Approx(4.0));
}

TEST_CASE("independence test") {
  const auto indep = chi_square_independence({{20, 30}, {40, 60}});
  CHECK(indep.statistic == doctest::Approx(0.0));
  CHECK(indep.dof == 1);
  const auto dep = chi_square_independence({{50, 0}, {0, 50}});
  CHECK(dep.p_value < 1e-10);
  // Empty rows are dropped.
  CHECK(chi_square_independence({{20, 30}, {0, 0}, {40, 60}}).dof == 1);
}
