#include <doctest.h>

#include <algorithm>
#include <random>

#include "grabforest/errors.hpp"
#include "grabforest/exact_oracle.hpp"
#include "grabforest/forest.hpp"
#include "grabforest/gw_sampler.hpp"

using namespace grabforest;

TEST_CASE("parse_forest splits at successive passages") {
  const std::vector<Degree> seq{1, 2, 1, 0, 0, 1, 0};
  const PlanarForest f = parse_forest(seq, 2);
  REQUIRE(f.tree_count() == 2);
  CHECK(f.tree(0).size() == 5);
  CHECK(f.tree(1).size() == 2);
  CHECK(f.to_string() == "(1,2,1,0,0|1,0)");
  CHECK(f.vertex_count() == 7);
  CHECK(f.tree_start(1) == 5);
}

TEST_CASE("cherry") {
  const std::vector<Degree> seq{2, 0, 0};
  const PlanarForest f = parse_forest(seq, 1);
  CHECK(f.tree_count() == 1);
  CHECK(f.tree(0) == PlanarTree({2, 0, 0}));
}

TEST_CASE("early passage is rejected with its index") {
  const std::vector<Degree> seq{0, 0};
  try {
    parse_forest(seq, 1);
    FAIL("expected InvalidSequence");
  } catch (const InvalidSequence& e) {
    CHECK(e.index() == 1);
  }
  CHECK_THROWS_AS(PlanarTree({0, 0}), InvalidSequence);
  CHECK_THROWS_AS(parse_tree_text("(0,0)"), InvalidSequence);
  // Never reaches -k.
  const std::vector<Degree> short_seq{2, 0};
  CHECK_THROWS_AS(parse_forest(short_seq, 1), InvalidSequence);
}

TEST_CASE("text formats") {
  CHECK(parse_tree_text(" ( 2 , 0 , 0 ) ").to_string() == "(2,0,0)");
  CHECK(parse_forest_text("(0|0|0)").tree_count() == 3);
  CHECK(parse_forest_text("(1,2,1,0,0|1,0)").to_string() == "(1,2,1,0,0|1,0)");
  CHECK_THROWS_AS(parse_forest_text("(1,0"), ParseError);
  CHECK_THROWS_AS(parse_forest_text("2,0,0"), ParseError);
  CHECK_THROWS_AS(parse_tree_text("(0|0)"), ParseError);
}

TEST_CASE("round trip through concatenated outdegrees") {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      for (const auto& f : enumerate_forests(n, k, {0, 1, 2, 3})) {
        const auto degrees = f.outdegrees();
        CHECK(parse_forest({degrees.begin(), degrees.end()}, k) == f);
        CHECK(parse_forest_text(f.to_string()) == f);
        CHECK(PlanarForest::from_trees(f.trees()) == f);
      }
    }
  }
}

TEST_CASE("walk is downwards skip-free") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Degree> degrees(1 + gen() % 15);
    for (auto& d : degrees) d = static_cast<Degree>(gen() % 4);
    const LukasiewiczWalk walk(degrees);
    const auto sums = walk.partial_sums();
    std::int64_t low = 0;
    for (std::size_t i = 1; i < sums.size(); ++i) {
      CHECK(sums[i] >= sums[i - 1] - 1);
      // A new minimum is always exactly one below the previous one.
      if (sums[i] < low) {
        CHECK(sums[i] == low - 1);
        low = sums[i];
        CHECK(walk.first_passage(static_cast<std::size_t>(-low)) == i);
      }
    }
  }
}

TEST_CASE("tree mass up to size S matches first passage") {
  const RationalLaw law = parse_rational_law("0:1/2,1:1/4,2:1/4");
  const auto trees = enumerate_trees(8);
  for (std::size_t S = 1; S <= 8; ++S) {
    Rational mass = 0, passage = 0;
    for (const auto& t : trees) {
      if (t.size() <= S) mass += tree_probability(law, t);
    }
    for (std::size_t s = 1; s <= S; ++s) passage += first_passage_pmf(law, 1, s);
    CHECK(mass == passage);
  }
}

namespace {

// Terminal state of a two-tree example: vertex labels by depth-first position.
LabeledForest two_tree_example() {
  return {parse_forest_text("(1,2,1,0,0|1,0)"), {7, 6, 5, 1, 2, 4, 3}, {0, 2, 1, 3, 4, 0, 5}};
}

}  // namespace

TEST_CASE("labeled forest") {
  const LabeledForest f = two_tree_example();
  CHECK_NOTHROW(f.validate());
  CHECK(shape_of(f) == parse_forest(std::vector<Degree>{1, 2, 1, 0, 0, 1, 0}, 2));
  CHECK(f.to_string() == "(1,2,1,0,0|1,0)#7,6,5,1,2,4,3#0,2,1,3,4,0,5");
  const auto out = f.outdegree_by_label();
  CHECK(out == std::vector<Degree>{0, 0, 0, 1, 1, 2, 1});
  const auto parents = f.parent_positions();
  CHECK(parents[0] == LabeledForest::npos);
  CHECK(parents[1] == 0);
  CHECK(parents[2] == 1);
  CHECK(parents[4] == 1);
  CHECK(parents[5] == LabeledForest::npos);
  CHECK(parents[6] == 5);

  SUBCASE("shape is invariant under relabeling") {
    LabeledForest g = f;
    for (auto& v : g.vertex_labels) v = 8 - v;
    for (auto& e : g.edge_labels) {
      if (e) e = 6 - e;
    }
    CHECK_NOTHROW(g.validate());
    CHECK(shape_of(g) == shape_of(f));
  }
  SUBCASE("bad labels") {
    LabeledForest g = f;
    g.vertex_labels[0] = 6;
    CHECK_THROWS_AS(g.validate(), InvalidLabels);
    g = f;
    g.edge_labels[0] = 1;
    CHECK_THROWS_AS(g.validate(), InvalidLabels);
    g = f;
    g.edge_labels.pop_back();
    CHECK_THROWS_AS(g.validate(), InvalidLabels);
  }
}

TEST_CASE("isolated roots") {
  const LabeledForest f{parse_forest_text("(0|0|0)"), {2, 3, 1}, {0, 0, 0}};
  CHECK_NOTHROW(f.validate());
  CHECK(shape_of(f).tree_count() == 3);
}
