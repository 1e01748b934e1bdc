#include <doctest.h>

#include "grabforest/errors.hpp"
#include "grabforest/exact_oracle.hpp"
#include "grabforest/experiments.hpp"
#include "grabforest/gw_sampler.hpp"

using namespace grabforest;

namespace {

const FloatLaw kBinary = parse_float_law("0:0.5,2:0.5");
const FloatLaw kSub = parse_float_law("0:0.5,1:0.3,2:0.2");

double value(const ExperimentReport& r, const std::string& curve, double x) {
  const auto row = r.row(curve, x);
  REQUIRE(row.has_value());
  return row->value;
}

}  // namespace

TEST_CASE("replica kernel matches the serial reference") {
  const RunOptions opts{77, 4};
  auto body = [](Rng& rng, std::size_t rep) {
    const ArmVector arms({2, 0, 1, 0, 0, 1, 0});
    return simulate_terminal(arms, rng).to_string() + "/" + std::to_string(rep);
  };
  CHECK(run_replicas(500, opts, stream_base(3), body) ==
        run_replicas_serial(500, opts, stream_base(3), body));
  CHECK_THROWS_AS(run_replicas(100, opts, 0,
                               [](Rng&, std::size_t rep) -> int {
                                 if (rep % 7 == 3) throw OutOfRange("rep " + std::to_string(rep));
                                 return 0;
                               }),
                  OutOfRange);
}

TEST_CASE("tree frequency trivial cases") {
  const RunOptions opts{1, 0};
  const auto dirac = theorem2_experiment(FloatLaw::dirac(0), PlanarTree({0}), {10, 20}, 50, opts);
  CHECK(value(dirac, "msd", 10) == 0.0);
  CHECK(value(dirac, "mean_k", 20) == 20.0);
  CHECK(dirac.passed());

  const auto outside = theorem2_experiment(kBinary, PlanarTree({1, 0}), {30}, 50, opts);
  CHECK(value(outside, "msd", 30) == 0.0);
  CHECK(value(outside, "mean_proportion", 30) == 0.0);

  CHECK_THROWS_AS(theorem2_experiment(parse_float_law("0:0.25,2:0.75"), PlanarTree({0}), {10},
                                      10, opts),
                  HypothesisViolated);
  CHECK_THROWS_AS(theorem2_experiment(FloatLaw::dirac(1), PlanarTree({0}), {10}, 10, opts),
                  HypothesisViolated);
}

TEST_CASE("experiments are reproducible and schedule independent") {
  const PlanarTree t({0});
  const auto serial = theorem2_experiment(kBinary, t, {40, 80}, 300, {5, 1});
  const auto parallel = theorem2_experiment(kBinary, t, {40, 80}, 300, {5, 4});
  CHECK(to_json(serial).dump() == to_json(parallel).dump());
  CHECK(to_csv(serial) == to_csv(theorem2_experiment(kBinary, t, {40, 80}, 300, {5, 1})));
  const auto other = theorem2_experiment(kBinary, t, {40, 80}, 300, {6, 1});
  CHECK(to_json(other).dump() != to_json(serial).dump());
}

TEST_CASE("finite-n pair probability against exhaustive enumeration") {
  // Mixture over k of the exact conditioned GW law, with weights
  // P(S_n = n - k | S_n <= n - 1).
  const RationalLaw law = parse_rational_law("0:1/2,1:1/4,2:1/4");
  const PlanarTree t1({0}), t2({1, 0});
  for (std::size_t n : {5, 6, 7}) {
    const auto pmf = walk_pmf(law, n);
    Rational feasible = 0;
    for (std::size_t s = 0; s + 1 <= n && s < pmf.size(); ++s) feasible += pmf[s];
    Rational total = 0;
    for (std::size_t k = 3; k <= n; ++k) {
      if (pmf[n - k] == 0) continue;
      Rational hit = 0;
      for (const auto& [key, p] : exact_conditional_gw(law, k, n).outcomes) {
        const PlanarForest f = parse_forest_text(key);
        if (f.tree(0) == t1 && f.tree(1) == t2) hit += p;
      }
      total += pmf[n - k] / feasible * hit;
    }
    CHECK(pair_probability_finite_n(law.to_double(), t1, t2, n) ==
          doctest::Approx(to_double(total)).epsilon(1e-12));
  }
}

TEST_CASE("pair factorization") {
  // Critical case approaches the product from below.
  const double p200 = pair_probability_finite_n(kBinary, PlanarTree({0}), PlanarTree({0}), 200);
  const double p800 = pair_probability_finite_n(kBinary, PlanarTree({0}), PlanarTree({0}), 800);
  CHECK(p200 < p800);
  CHECK(p800 < 0.25);
  // Subcritical: many trees, factorization already holds closely.
  const double sub = pair_probability_finite_n(kSub, PlanarTree({0}), PlanarTree({0}), 2000);
  CHECK(sub == doctest::Approx(0.25).epsilon(0.01));

  const RunOptions opts{9, 0};
  const auto r = pair_factorization_experiment(kSub, PlanarTree({0}), PlanarTree({1, 0}), {400},
                                               4000, opts);
  CHECK(r.passed());
  const auto none = pair_factorization_experiment(kBinary, PlanarTree({1, 0}), PlanarTree({0}),
                                                  {100}, 200, opts);
  CHECK(value(none, "estimate", 100) == 0.0);
  CHECK(value(none, "product", 100) == 0.0);
  CHECK(none.passed());
}

TEST_CASE("tree count experiment") {
  const RunOptions opts{4, 0};
  const auto dirac = tree_count_experiment(FloatLaw::dirac(0), {10, 50}, 20, opts);
  CHECK(value(dirac, "k_over_n", 50) == 1.0);
  CHECK(dirac.passed());
  const auto sub = tree_count_experiment(kSub, {1000}, 300, opts);
  CHECK(value(sub, "k_over_n", 1000) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(sub.passed());
  const auto crit = tree_count_experiment(kBinary, {100, 400, 1600}, 300, opts, {10});
  CHECK(value(crit, "p_k_ge_10", 1600) > value(crit, "p_k_ge_10", 100));
  CHECK(crit.passed());
  CHECK_THROWS_AS(tree_count_experiment(parse_float_law("0:0.25,2:0.75"), {10}, 5, opts),
                  HypothesisViolated);
}

TEST_CASE("ratio limit check") {
  const FloatLaw law = parse_float_law("0:0.35,1:0.30,2:0.35");
  const auto r = ratio_limit_check(law, {50, 200, 800}, 5);
  CHECK(r.passed());
  CHECK(value(r, "ratio", 50) < value(r, "ratio", 200));
  CHECK(value(r, "ratio", 800) < 1.0);
  const auto zero = ratio_limit_check(law, {10, 20}, 0);
  CHECK(value(zero, "ratio", 10) == 1.0);
  CHECK(value(zero, "ratio", 20) == 1.0);
  CHECK_THROWS_AS(ratio_limit_check(kBinary, {10}, 1), PeriodicSupport);
  CHECK_THROWS_AS(ratio_limit_check(kSub, {10}, 1), HypothesisViolated);
}

TEST_CASE("tree size pmf") {
  const auto pmf = tree_size_pmf(kSub, 12);
  for (std::size_t s = 1; s <= 12; ++s) {
    CHECK(pmf[s] == doctest::Approx(first_passage_pmf(kSub, 1, s)).epsilon(1e-12));
  }
}

TEST_CASE("supercritical experiment") {
  const RunOptions opts{12, 0};
  const auto r =
      supercritical_k_experiment(parse_float_law("0:0.25,2:0.75"), {40, 80}, 400, 0.5, opts);
  CHECK(value(r, "acceptance", 80) < value(r, "acceptance", 40));
  CHECK(r.row("fit_ratio", 80).has_value());
  CHECK(r.passed());
  CHECK_THROWS_AS(supercritical_k_experiment(kBinary, {40}, 10, 0.5, opts), HypothesisViolated);
}

TEST_CASE("configuration model comparison") {
  const RunOptions opts{3, 0};
  const auto r = config_model_cluster_experiment(kSub, 500, 20'000, opts);
  CHECK(value(r, "cluster_tv", 500) < 0.03);
  CHECK(r.warnings.empty());
  CHECK(r.row("contrast_tv_uniform_vs_arm", 500).has_value());
  CHECK_THROWS_AS(config_model_cluster_experiment(FloatLaw::dirac(0), 50, 10, opts), ZeroMean);
  const auto giant = config_model_cluster_experiment(parse_float_law("0:0.5,3:0.5"), 200, 50, opts);
  REQUIRE(giant.warnings.size() >= 1);
  CHECK(giant.warnings[0].rfind("GiantComponentWarning", 0) == 0);
}

TEST_CASE("free forest tree sizes") {
  const auto r = dwass_experiment(kBinary, 3, 20'000, 10'000, {8, 0});
  CHECK(r.passed());
  CHECK(value(r, "size_pmf_expected", 3) == doctest::Approx(0.125));
  CHECK(value(r, "size_pmf_expected", 2) == 0.0);
}

TEST_CASE("cyclic shifts and conditioned sampler") {
  CHECK(cyclic_shift_check(2000, 20, {1, 0}).passed());
  const auto cmp = conditioned_sampler_comparison(kBinary, 2, 8, 20'000, {2, 0});
  CHECK(value(cmp, "tv_sampler_vs_rejection", 8) < 0.03);
  CHECK(value(cmp, "distinct_forests_sampler", 8) == 14.0);
}

TEST_CASE("conditioned shape law pipeline") {
  const auto r = conditioned_shape_monte_carlo(parse_rational_law("0:1/2,2:1/2"), 2, 6, 20'000, {1, 0});
  CHECK(r.passed());
  CHECK(r.parameters["shapes"].size() == 5);
}

TEST_CASE("exact verifications") {
  const auto uniform = verify_uniform_terminal_law(ArmVector({2, 0, 0}));
  CHECK(uniform.passed());
  CHECK(uniform.checks[0].detail == "uniform over 4 states, exact");
  CHECK(verify_uniform_terminal_law_exhaustive(4, 3).passed());
  CHECK(verify_conditioned_shape_law(parse_rational_law("0:1/2,2:1/2"), 5, true).passed());
  const auto kemp = kemperman_check(parse_rational_law("0:1/2,1:1/4,2:1/4"), 15);
  CHECK(kemp.passed());
  CHECK(value(kemp, "max_abs_deviation_formula", 15) == 0.0);
}

TEST_CASE("report serialization") {
  ExperimentReport r;
  r.experiment = "demo";
  r.parameters["reps"] = 3;
  r.add("msd", 50, 0.25, 0.5);
  r.add("msd", 200, 0.125);
  r.add("acceptance", 50, 1.0);
  r.check("ok", true);
  CHECK(r.passed());
  CHECK(r.curve("msd").size() == 2);
  CHECK(to_csv(r) ==
        "# experiment: demo\n# parameters: {\"reps\":3}\ncurve,x,value,se\n"
        "msd,50,0.25,0.5\nmsd,200,0.125,\nacceptance,50,1,\n");
  const auto plots = plot_csvs(r);
  CHECK(plots.at("msd") == "x,value\n50,0.25\n200,0.125\n");
  const auto doc = to_json(r, {{"seed", 42}});
  CHECK(doc["metadata"]["seed"] == 42);
  CHECK(doc["rows"][1]["se"].is_null());
  r.check("bad", false);
  CHECK_FALSE(r.passed());
  CHECK(format_number(0.1) == "0.1");
}
