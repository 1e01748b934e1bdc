#include <doctest.h>

#include "grabforest/errors.hpp"
#include "grabforest/forest.hpp"
#include "grabforest/law.hpp"

using namespace grabforest;

TEST_CASE("float law parsing") {
  const FloatLaw law = parse_float_law("0:0.5,2:0.5");
  REQUIRE(law.support_size() == 2);
  CHECK(law.prob(0) == 0.5);
  CHECK(law.prob(1) == 0.0);
  CHECK(law.prob(2) == 0.5);
  CHECK(law.mean() == doctest::Approx(1.0));
  CHECK(law.criticality() == Criticality::critical);

  SUBCASE("whitespace and fractions") {
    const FloatLaw spaced = parse_float_law(" 2 : 1/2 , 0:1/2 ");
    CHECK(spaced == law);
  }
  SUBCASE("zero entries are dropped") {
    const FloatLaw with_zero = parse_float_law("0:0.5,1:0,2:0.5");
    CHECK(with_zero.support_size() == 2);
  }
  SUBCASE("text round trip") { CHECK(parse_float_law(law.to_string()) == law); }
}

TEST_CASE("normalization errors") {
  CHECK_THROWS_AS(parse_float_law("0:0.5,2:0.6"), NotNormalized);
  CHECK_THROWS_AS(parse_rational_law("0:1/2,2:1/3"), NotNormalized);
  // Rational mode is exact: a sum off by 1e-12 is still rejected.
  CHECK_THROWS_AS(parse_rational_law("0:0.5,2:0.499999999999"), NotNormalized);
  CHECK_NOTHROW(parse_float_law("0:0.5,2:0.4999999999999"));
}

TEST_CASE("invalid laws") {
  CHECK_THROWS_AS(parse_float_law("0:0.5,0:0.5"), InvalidLaw);
  CHECK_THROWS_AS(parse_float_law("0:-0.5,2:1.5"), InvalidLaw);
  CHECK_THROWS_AS(FloatLaw({}), InvalidLaw);
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_float_law("0:0.5,x:0.5");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 6);
  }
  CHECK_THROWS_AS(parse_float_law(""), ParseError);
  CHECK_THROWS_AS(parse_float_law("0:0.5,"), ParseError);
  CHECK_THROWS_AS(parse_rational_law("0:1/0"), ParseError);
}

TEST_CASE("rational laws are exact") {
  const RationalLaw law = parse_rational_law("0:1/2,2:1/2");
  CHECK(law.prob(0) == Rational(1, 2));
  CHECK(law.mean() == 1);
  CHECK(law.to_string() == "0:1/2,2:1/2");
  // Decimals become exact fractions.
  const RationalLaw dec = parse_rational_law("0:0.35,1:0.30,2:0.35");
  CHECK(dec.prob(0) == Rational(7, 20));
  CHECK(dec.mean() == 1);
  CHECK(dec.criticality() == Criticality::critical);
  CHECK(dec.to_double().prob(1) == doctest::Approx(0.3));
}

TEST_CASE("criticality classes") {
  CHECK(parse_float_law("0:0.5,1:0.3,2:0.2").criticality() == Criticality::subcritical);
  CHECK(parse_float_law("0:0.25,2:0.75").criticality() == Criticality::supercritical);
  CHECK(FloatLaw::dirac(0).criticality() == Criticality::subcritical);
  CHECK(FloatLaw::dirac(1).criticality() == Criticality::critical);
  CHECK(to_string(Criticality::supercritical) == "supercritical");
}

TEST_CASE("support period") {
  CHECK(support_period(support_of(parse_float_law("0:0.5,2:0.5"))) == 2);
  CHECK(support_period(support_of(parse_float_law("0:0.35,1:0.3,2:0.35"))) == 1);
  CHECK(support_period(support_of(parse_float_law("1:0.5,4:0.5"))) == 3);
}

TEST_CASE("tree probability examples") {
  const RationalLaw binary = parse_rational_law("0:1/2,2:1/2");
  CHECK(tree_probability(binary, parse_tree_text("(0)")) == Rational(1, 2));
  CHECK(tree_probability(binary, parse_tree_text("(2,0,0)")) == Rational(1, 8));
  CHECK(tree_probability(binary, parse_tree_text("(1,0)")) == 0);
  const RationalLaw three = parse_rational_law("0:1/2,1:1/4,2:1/4");
  CHECK(tree_probability(three, parse_tree_text("(1,1,0)")) == Rational(1, 32));
}

TEST_CASE("tree probability is multiplicative over forests") {
  const RationalLaw law = parse_rational_law("0:1/2,1:1/4,2:1/4");
  const PlanarForest f = parse_forest_text("(1,2,1,0,0|1,0)");
  Rational product = 1;
  for (const auto& t : f.trees()) product *= tree_probability(law, t);
  CHECK(forest_probability(law, f) == product);
}
