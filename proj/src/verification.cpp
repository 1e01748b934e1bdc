#include <string>

#include "grabforest/errors.hpp"
#include "grabforest/exact_oracle.hpp"
#include "grabforest/experiments.hpp"
#include "grabforest/gw_sampler.hpp"

namespace grabforest {

ExperimentReport verify_uniform_terminal_law(const ArmVector& arms) {
  const ExactLaw exact = exact_terminal_law(arms);
  std::vector<std::string> keys;
  for (const auto& f : enumerate_phi(arms)) keys.push_back(f.to_string());

  ExperimentReport report;
  report.experiment = "verify-lemma1";
  report.parameters["arms"] = arms.to_string();
  report.add("states", static_cast<double>(arms.n()), static_cast<double>(keys.size()));
  report.add("terminal_outcomes", static_cast<double>(arms.n()),
             static_cast<double>(exact.outcomes.size()));
  report.check("uniform_on_labeled_forests", exact.is_uniform_on(keys),
               "uniform over " + std::to_string(keys.size()) + " states, exact");
  return report;
}

namespace {

// Calls fn on every length-n vector of nonnegative counts with sum <= cap.
template <class Fn>
void for_each_arm_vector(std::size_t n, std::size_t cap, Fn&& fn) {
  std::vector<Degree> x(n, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i == n) {
      fn(x);
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      x[i] = static_cast<Degree>(v);
      self(self, i + 1, left - v);
    }
    x[i] = 0;
  };
  rec(rec, 0, cap);
}

}  // namespace

ExperimentReport verify_uniform_terminal_law_exhaustive(std::size_t max_n, std::size_t max_arms) {
  ExperimentReport report;
  report.experiment = "verify-lemma1-exhaustive";
  report.parameters["max_n"] = max_n;
  report.parameters["max_arms"] = max_arms;
  std::size_t failures_total = 0;
  for (std::size_t n = 2; n <= max_n; ++n) {
    std::size_t checked = 0, failures = 0;
    for_each_arm_vector(n, std::min(max_arms, n - 1), [&](const std::vector<Degree>& x) {
      const ArmVector arms(x);
      ++checked;
      if (!verify_uniform_terminal_law(arms).passed()) ++failures;
    });
    report.add("arm_vectors", static_cast<double>(n), static_cast<double>(checked));
    report.add("failures", static_cast<double>(n), static_cast<double>(failures));
    failures_total += failures;
  }
  report.check("all_uniform_on_labeled_forests", failures_total == 0,
               std::to_string(failures_total) + " arm vectors not uniform");
  return report;
}

ExperimentReport verify_conditioned_shape_law(const RationalLaw& law, std::size_t max_n, bool dynamics) {
  ExperimentReport report;
  report.experiment = "verify-theorem1";
  report.parameters["law"] = law.to_string();
  report.parameters["max_n"] = max_n;
  report.parameters["dynamics_route"] = dynamics;
  std::size_t mismatches_total = 0;
  for (std::size_t n = 2; n <= max_n; ++n) {
    std::size_t checked = 0, mismatches = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      if (first_passage_pmf(law, k, n) == 0) continue;
      const ExactLaw target = exact_conditional_gw(law, k, n);
      ++checked;
      if (conditioned_terminal_shape_law(law, k, n, ShapeRoute::uniform_labeled) != target) {
        ++mismatches;
      }
      if (dynamics &&
          conditioned_terminal_shape_law(law, k, n, ShapeRoute::dynamics) != target) {
        ++mismatches;
      }
    }
    report.add("pairs_checked", static_cast<double>(n), static_cast<double>(checked));
    report.add("mismatches", static_cast<double>(n), static_cast<double>(mismatches));
    mismatches_total += mismatches;
  }
  report.check("mixture_equals_conditioned_gw", mismatches_total == 0,
               std::to_string(mismatches_total) + " mismatching (k, n) pairs");
  return report;
}

ExperimentReport kemperman_check(const RationalLaw& law, std::size_t n_max) {
  ExperimentReport report;
  report.experiment = "kemperman";
  report.parameters["law"] = law.to_string();
  report.parameters["n_max"] = n_max;

  Rational formula_dev = 0, direct_dev = 0, enumeration_dev = 0;
  std::size_t pairs = 0;
  for (std::size_t n = 2; n <= n_max; ++n) {
    const auto pmf = walk_pmf(law, n);
    for (std::size_t k = 1; k < n; ++k) {
      const Rational closed = first_passage_pmf(law, k, n);
      const Rational walk = n - k < pmf.size() ? pmf[n - k] : Rational(0);
      const Rational formula = Rational(static_cast<long>(k), static_cast<long>(n)) * walk;
      formula_dev = std::max<Rational>(formula_dev, abs(closed - formula));
      direct_dev = std::max<Rational>(direct_dev, abs(closed - first_passage_pmf_direct(law, k, n)));
      if (n <= kDefaultConditionalBound) {
        enumeration_dev =
            std::max<Rational>(enumeration_dev, abs(closed - conditional_gw_mass(law, k, n)));
      }
      ++pairs;
    }
  }
  const double x = static_cast<double>(n_max);
  report.add("pairs_checked", x, static_cast<double>(pairs));
  report.add("max_abs_deviation_formula", x, to_double(formula_dev));
  report.add("max_abs_deviation_direct", x, to_double(direct_dev));
  report.add("max_abs_deviation_enumeration", x, to_double(enumeration_dev));
  report.check("formula_exact", formula_dev == 0, "max deviation " + to_string(formula_dev));
  report.check("killed_walk_exact", direct_dev == 0, "max deviation " + to_string(direct_dev));
  report.check("enumeration_exact", enumeration_dev == 0,
               "max deviation " + to_string(enumeration_dev));
  return report;
}

}  // namespace grabforest
