#include "grabforest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "grabforest/errors.hpp"
#include "grabforest/exact_oracle.hpp"
#include "grabforest/gw_sampler.hpp"
#include "grabforest/stats.hpp"

namespace grabforest {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

MeanSe proportion_se(std::size_t hits, std::size_t total) {
  const double p = static_cast<double>(hits) / static_cast<double>(total);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
}

nlohmann::ordered_json rng_json(const RunOptions& opts) {
  return {{"generator", Rng::kGenerator},
          {"stream_derivation", Rng::kStreamDerivation},
          {"seed", opts.seed}};
}

ExperimentReport start_report(const char* name, const FloatLaw& law, const RunOptions& opts) {
  ExperimentReport report;
  report.experiment = name;
  report.parameters["law"] = law.to_string();
  report.parameters["rng"] = rng_json(opts);
  return report;
}

// Hypotheses shared by the subcritical/critical experiments.
void require_not_supercritical(const FloatLaw& law) {
  if (law.criticality() == Criticality::supercritical) {
    throw HypothesisViolated("law is supercritical (mean " + format_number(law.mean()) +
                             "); this experiment needs m <= 1");
  }
}

void require_n_values(const std::vector<std::size_t>& n_list) {
  if (n_list.empty()) throw OutOfRange("at least one n value is required");
  for (std::size_t n : n_list) {
    if (n < 2) throw OutOfRange("n must be at least 2, got " + std::to_string(n));
  }
}

bool same_tree(std::span<const Degree> a, std::span<const Degree> b) {
  return std::ranges::equal(a, b);
}

}  // namespace

std::vector<double> tree_size_pmf(const FloatLaw& law, std::size_t max_size) {
  std::vector<double> out(max_size + 1, 0.0);
  if (max_size == 0) return out;
  // cur[s] = P(S_j = s) for s < max_size, updated one step at a time.
  std::vector<double> cur(max_size, 0.0), next(max_size, 0.0);
  cur[0] = 1.0;
  for (std::size_t j = 1; j <= max_size; ++j) {
    std::fill(next.begin(), next.end(), 0.0);
    const std::size_t top = std::min(max_size - 1, (j - 1) * law.max_value());
    for (std::size_t s = 0; s <= top; ++s) {
      if (cur[s] == 0.0) continue;
      for (const auto& e : law.entries()) {
        const std::size_t t = s + e.value;
        if (t < max_size) next[t] += cur[s] * e.prob;
      }
    }
    cur.swap(next);
    out[j] = cur[j - 1] / static_cast<double>(j);
  }
  return out;
}

ExperimentReport theorem2_experiment(const FloatLaw& law, const PlanarTree& tree,
                                     const std::vector<std::size_t>& n_list, std::size_t reps,
                                     const RunOptions& opts) {
  require_not_supercritical(law);
  if (law.prob(0) <= 0.0) throw HypothesisViolated("mu(0) must be positive");
  require_n_values(n_list);
  if (reps < 2) throw OutOfRange("reps must be at least 2");

  const double target = tree_probability(law, tree);
  ExperimentReport report = start_report("theorem2", law, opts);
  report.parameters["tree"] = tree.to_string();
  report.parameters["target"] = target;
  report.parameters["n"] = n_list;
  report.parameters["reps"] = reps;

  struct Sample {
    double sq_dev = 0.0;
    double proportion = 0.0;
    double k = 0.0;
  };
  std::vector<MeanSe> msd;
  for (std::size_t c = 0; c < n_list.size(); ++c) {
    const std::size_t n = n_list[c];
    const SumConditionedSampler arms_sampler(law, n, 0, n - 1);
    auto samples = run_replicas(reps, opts, stream_base(c), [&](Rng& rng, std::size_t) {
      const ArmVector arms(arms_sampler(rng));
      const PlanarForest forest = simulate_shape(arms, rng);
      const double k = static_cast<double>(forest.tree_count());
      const double proportion = static_cast<double>(count_matching_trees(forest, tree)) / k;
      return Sample{(proportion - target) * (proportion - target), proportion, k};
    });
    std::vector<double> sq, prop, ks;
    for (const auto& s : samples) {
      sq.push_back(s.sq_dev);
      prop.push_back(s.proportion);
      ks.push_back(s.k);
    }
    const double x = static_cast<double>(n);
    msd.push_back(mean_se(sq));
    report.add("msd", x, msd.back().mean, msd.back().se);
    const MeanSe p = mean_se(prop);
    report.add("mean_proportion", x, p.mean, p.se);
    const MeanSe k = mean_se(ks);
    report.add("mean_k", x, k.mean, k.se);
    report.add("acceptance", x, arms_sampler.acceptance());
  }

  bool monotone = true;
  std::string detail;
  for (std::size_t i = 1; i < msd.size(); ++i) {
    const double slack = 2.0 * std::hypot(msd[i - 1].se, msd[i].se);
    if (msd[i].mean > msd[i - 1].mean + slack) {
      monotone = false;
      detail = "increase at n=" + std::to_string(n_list[i]);
    }
  }
  report.check("msd_non_increasing_within_2se", monotone, detail);
  return report;
}

double pair_probability_finite_n(const FloatLaw& law, const PlanarTree& t1, const PlanarTree& t2,
                                 std::size_t n) {
  const double p1 = tree_probability(law, t1);
  const double p2 = tree_probability(law, t2);
  if (p1 == 0.0 || p2 == 0.0) return 0.0;
  const std::size_t used = t1.size() + t2.size();
  if (n < used + 1) return 0.0;

  // Given k trees the terminal shape is a GW forest conditioned on n
  // vertices, so the two leftmost trees are (t1, t2) with probability
  // p1 p2 P(T_{k-2} = n - used) / P(T_k = n). The weight P(S_n = n - k) of
  // k cancels against the denominator.
  const auto full = walk_pmf(law, n, n - 1);
  double feasible = 0.0;
  for (double p : full) feasible += p;
  if (feasible == 0.0) throw Infeasible("no arm configuration leaves a root");

  const std::size_t m = n - used;
  const auto rest = walk_pmf(law, m, m);
  double acc = 0.0;
  for (std::size_t k = 3; k <= n; ++k) {
    const std::size_t j = k - 2;
    if (j > m) break;
    if (full[n - k] == 0.0 || m - j >= rest.size()) continue;
    acc += (static_cast<double>(n) / static_cast<double>(k)) *
           (static_cast<double>(j) / static_cast<double>(m)) * rest[m - j];
  }
  return p1 * p2 * acc / feasible;
}

ExperimentReport pair_factorization_experiment(const FloatLaw& law, const PlanarTree& t1,
                                               const PlanarTree& t2,
                                               const std::vector<std::size_t>& n_list,
                                               std::size_t reps, const RunOptions& opts) {
  require_not_supercritical(law);
  if (law.prob(0) <= 0.0) throw HypothesisViolated("mu(0) must be positive");
  require_n_values(n_list);
  if (reps < 2) throw OutOfRange("reps must be at least 2");

  const double product = tree_probability(law, t1) * tree_probability(law, t2);
  ExperimentReport report = start_report("pairfact", law, opts);
  report.parameters["tree1"] = t1.to_string();
  report.parameters["tree2"] = t2.to_string();
  report.parameters["product"] = product;
  report.parameters["n"] = n_list;
  report.parameters["reps"] = reps;

  struct Hit {
    bool forward = false;
    bool swapped = false;
  };
  MeanSe last, last_swapped;
  double last_exact = 0.0;
  for (std::size_t c = 0; c < n_list.size(); ++c) {
    const std::size_t n = n_list[c];
    const SumConditionedSampler arms_sampler(law, n, 0, n - 1);
    auto hits = run_replicas(reps, opts, stream_base(c), [&](Rng& rng, std::size_t) {
      const ArmVector arms(arms_sampler(rng));
      const PlanarForest f = simulate_shape(arms, rng);
      Hit h;
      if (f.tree_count() >= 3) {
        const auto first = f.tree_outdegrees(0);
        const auto second = f.tree_outdegrees(1);
        h.forward = same_tree(first, t1.outdegrees()) && same_tree(second, t2.outdegrees());
        h.swapped = same_tree(first, t2.outdegrees()) && same_tree(second, t1.outdegrees());
      }
      return h;
    });
    std::size_t forward = 0, swapped = 0;
    for (const auto& h : hits) {
      forward += h.forward;
      swapped += h.swapped;
    }
    const double x = static_cast<double>(n);
    last = proportion_se(forward, reps);
    last_swapped = proportion_se(swapped, reps);
    last_exact = pair_probability_finite_n(law, t1, t2, n);
    report.add("estimate", x, last.mean, last.se);
    report.add("estimate_swapped", x, last_swapped.mean, last_swapped.se);
    report.add("finite_n_exact", x, last_exact);
    report.add("product", x, product);
  }

  report.check("product_within_3se", std::abs(last.mean - product) <= 3.0 * last.se,
               "estimate " + format_number(last.mean) + " vs " + format_number(product));
  report.check("finite_n_within_3se", std::abs(last.mean - last_exact) <= 3.0 * last.se,
               "estimate " + format_number(last.mean) + " vs " + format_number(last_exact));
  report.check("swap_within_3se",
               std::abs(last.mean - last_swapped.mean) <=
                   3.0 * std::hypot(last.se, last_swapped.se));
  return report;
}

ExperimentReport tree_count_experiment(const FloatLaw& law,
                                       const std::vector<std::size_t>& n_list,
                                       std::size_t reps, const RunOptions& opts,
                                       const std::vector<std::size_t>& grid) {
  require_not_supercritical(law);
  require_n_values(n_list);
  if (reps < 2) throw OutOfRange("reps must be at least 2");

  ExperimentReport report = start_report("treecount", law, opts);
  report.parameters["n"] = n_list;
  report.parameters["reps"] = reps;
  report.parameters["grid"] = grid;
  const bool subcritical = law.criticality() == Criticality::subcritical;

  // at_least[c][g] = P(k(n_c) >= grid[g]) estimate
  std::vector<std::vector<MeanSe>> at_least;
  MeanSe last_ratio;
  for (std::size_t c = 0; c < n_list.size(); ++c) {
    const std::size_t n = n_list[c];
    const SumConditionedSampler arms_sampler(law, n, 0, n - 1);
    auto ks = run_replicas(reps, opts, stream_base(c), [&](Rng& rng, std::size_t) {
      const ArmVector arms(arms_sampler(rng));
      return simulate_shape(arms, rng).tree_count();
    });
    const double x = static_cast<double>(n);
    at_least.emplace_back();
    for (std::size_t K : grid) {
      const auto hits = static_cast<std::size_t>(
          std::count_if(ks.begin(), ks.end(), [K](std::size_t k) { return k >= K; }));
      at_least.back().push_back(proportion_se(hits, reps));
      report.add("p_k_ge_" + std::to_string(K), x, at_least.back().back().mean,
                 at_least.back().back().se);
    }
    std::vector<double> ratios;
    for (std::size_t k : ks) ratios.push_back(static_cast<double>(k) / x);
    last_ratio = mean_se(ratios);
    report.add("k_over_n", x, last_ratio.mean, last_ratio.se);
    report.add("acceptance", x, arms_sampler.acceptance());
    if (subcritical) report.add("one_minus_m", x, 1.0 - law.mean());
  }

  if (subcritical) {
    const double target = 1.0 - law.mean();
    report.check("k_over_n_within_3se_of_1_minus_m",
                 std::abs(last_ratio.mean - target) <= 3.0 * last_ratio.se + 1e-12,
                 format_number(last_ratio.mean) + " vs " + format_number(target));
  } else {
    bool monotone = true;
    for (std::size_t c = 1; c < at_least.size(); ++c) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto& a = at_least[c - 1][g];
        const auto& b = at_least[c][g];
        if (b.mean < a.mean - 2.0 * std::hypot(a.se, b.se)) monotone = false;
      }
    }
    report.check("tail_probabilities_non_decreasing_within_2se", monotone);
  }
  return report;
}

ExperimentReport ratio_limit_check(const FloatLaw& law, const std::vector<std::size_t>& n_list,
                                   std::size_t ell) {
  if (law.criticality() != Criticality::critical) {
    throw HypothesisViolated("ratio limit check needs a critical law, mean is " +
                             format_number(law.mean()));
  }
  if (support_period(support_of(law)) != 1) {
    throw PeriodicSupport("support of " + law.to_string() + " lies on a proper sublattice");
  }
  if (n_list.empty()) throw OutOfRange("at least one n value is required");

  ExperimentReport report;
  report.experiment = "ratio";
  report.parameters["law"] = law.to_string();
  report.parameters["n"] = n_list;
  report.parameters["ell"] = ell;

  std::vector<double> ratios;
  for (std::size_t n : n_list) {
    const auto pmf = walk_pmf(law, n, n);
    double upto_n = 0.0, upto_shifted = 0.0;
    for (std::size_t s = 0; s < pmf.size() && s <= n; ++s) {
      upto_n += pmf[s];
      if (s + ell <= n) upto_shifted += pmf[s];
    }
    const double ratio = upto_shifted / upto_n;
    ratios.push_back(ratio);
    report.add("ratio", static_cast<double>(n), ratio);
    report.add("one_minus_ratio", static_cast<double>(n), 1.0 - ratio);
  }
  bool monotone = true, bounded = true;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] > 1.0) bounded = false;
    if (i > 0 && ratios[i] < ratios[i - 1]) monotone = false;
  }
  report.check("ratios_at_most_one", bounded);
  report.check("ratios_non_decreasing_in_n", monotone);
  return report;
}

ExperimentReport supercritical_k_experiment(const FloatLaw& law,
                                            const std::vector<std::size_t>& n_list,
                                            std::size_t reps, double c,
                                            const RunOptions& opts) {
  if (law.criticality() != Criticality::supercritical) {
    throw HypothesisViolated("law is not supercritical (mean " + format_number(law.mean()) + ")");
  }
  if (law.prob(0) <= 0.0) throw HypothesisViolated("mu(0) must be positive");
  require_n_values(n_list);
  if (reps < 2) throw OutOfRange("reps must be at least 2");
  if (!(c > 0.0 && c < 1.0)) throw OutOfRange("c must lie in (0, 1)");

  ExperimentReport report = start_report("supercrit", law, opts);
  report.parameters["n"] = n_list;
  report.parameters["reps"] = reps;
  report.parameters["c"] = c;

  const std::size_t d = std::max<Degree>(1, support_period(support_of(law)));
  report.parameters["lattice_step"] = d;
  for (std::size_t cfg = 0; cfg < n_list.size(); ++cfg) {
    const std::size_t n = n_list[cfg];
    const double x = static_cast<double>(n);
    const SumConditionedSampler arms_sampler(law, n, 0, n - 1);
    auto ks = run_replicas(reps, opts, stream_base(cfg), [&](Rng& rng, std::size_t) {
      const ArmVector arms(arms_sampler(rng));
      return simulate_shape(arms, rng).tree_count();
    });

    // k = n - S_n is confined to one residue class modulo d.
    const std::size_t shift = (n % d + d - (n * law.min_value()) % d) % d;
    const std::size_t k_min = shift == 0 ? d : shift;
    std::map<std::size_t, std::uint64_t> steps;
    std::vector<double> kd;
    double step_sum = 0.0;
    for (std::size_t k : ks) {
      const std::size_t j = (k - k_min) / d;
      ++steps[j];
      step_sum += static_cast<double>(j);
      kd.push_back(static_cast<double>(k));
    }
    const double mean_steps = step_sum / static_cast<double>(reps);
    const double success = 1.0 / (1.0 + mean_steps);
    const double ratio = 1.0 - success;

    report.add("acceptance", x, arms_sampler.acceptance());
    const MeanSe mk = mean_se(kd);
    report.add("mean_k", x, mk.mean, mk.se);
    report.add("fit_ratio", x, ratio);

    FiniteLaw<std::size_t> fitted;
    double mass = success;
    for (std::size_t j = 0; mass * static_cast<double>(reps) >= 1e-3 || j <= steps.rbegin()->first;
         ++j) {
      fitted[j] = mass;
      mass *= ratio;
      if (mass == 0.0) break;
    }
    try {
      ChiSquareResult gof = chi_square_test(steps, fitted, reps);
      // One parameter was fitted from the same data.
      if (gof.dof > 1) {
        gof.dof -= 1;
        gof.p_value = chi_square_upper_tail(gof.statistic, gof.dof);
      }
      report.add("gof_statistic", x, gof.statistic);
      report.add("gof_p_value", x, gof.p_value);
    } catch (const DegenerateCells& e) {
      report.warnings.push_back("n=" + std::to_string(n) + ": goodness of fit skipped (" +
                                e.what() + ")");
    }
    const std::string curve = "k_pmf_n" + std::to_string(n);
    for (const auto& [j, count] : steps) {
      report.add(curve, static_cast<double>(k_min + j * d),
                 static_cast<double>(count) / static_cast<double>(reps));
    }
  }

  // Tilted law: mean 1 - c, so k(n)/n should sit near c.
  const std::size_t n = *std::max_element(n_list.begin(), n_list.end());
  const TiltResult tilt = exponential_tilt(law, 1.0 - c);
  report.parameters["tilted_law"] = tilt.law.to_string();
  report.parameters["tilt_scale"] = tilt.scale;
  const SumConditionedSampler tilted(tilt.law, n, 0, n - 1);
  auto fractions = run_replicas(reps, opts, stream_base(n_list.size()),
                                [&](Rng& rng, std::size_t) {
                                  const ArmVector arms(tilted(rng));
                                  return static_cast<double>(simulate_shape(arms, rng).tree_count()) /
                                         static_cast<double>(n);
                                });
  const MeanSe f = mean_se(fractions);
  report.add("tilted_k_over_n", static_cast<double>(n), f.mean, f.se);
  report.check("tilted_k_over_n_within_3se_of_c", std::abs(f.mean - c) <= 3.0 * f.se + 1e-12,
               format_number(f.mean) + " vs " + format_number(c));
  return report;
}

namespace {

// Vertices in the component of a uniformly chosen stub of a configuration
// model multigraph on n vertices with i.i.d. degrees.
std::size_t arm_cluster_size(const DiscreteSampler& degrees, std::size_t n, Rng& rng) {
  std::vector<std::size_t> offset(n + 1, 0);
  std::size_t stubs = 0;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 10'000) throw Infeasible("could not draw an even, positive stub count");
    for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + degrees(rng);
    stubs = offset[n];
    if (stubs > 0 && stubs % 2 == 0) break;
  }
  std::vector<std::uint32_t> owner(stubs);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t s = offset[v]; s < offset[v + 1]; ++s) owner[s] = static_cast<std::uint32_t>(v);
  }
  std::vector<std::uint32_t> order(stubs);
  for (std::size_t s = 0; s < stubs; ++s) order[s] = static_cast<std::uint32_t>(s);
  shuffle(order, rng);
  std::vector<std::uint32_t> mate(stubs);
  for (std::size_t i = 0; i < stubs; i += 2) {
    mate[order[i]] = order[i + 1];
    mate[order[i + 1]] = order[i];
  }

  const std::size_t start = owner[rng.uniform_below(stubs)];
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> queue{static_cast<std::uint32_t>(start)};
  seen[start] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t v = queue[head];
    for (std::size_t s = offset[v]; s < offset[v + 1]; ++s) {
      const std::uint32_t w = owner[mate[s]];
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return queue.size();
}

}  // namespace

ExperimentReport config_model_cluster_experiment(const FloatLaw& law, std::size_t n,
                                                 std::size_t reps, const RunOptions& opts) {
  if (n < 2) throw OutOfRange("n must be at least 2");
  if (reps < 1) throw OutOfRange("reps must be positive");
  // A law without arms leaves no arm to select.
  const FloatLaw biased = size_biased(law);
  const double criterion = molloy_reed_criterion(law);

  ExperimentReport report = start_report("configcmp", law, opts);
  report.parameters["n"] = n;
  report.parameters["reps"] = reps;
  report.parameters["size_biased_law"] = biased.to_string();
  report.parameters["molloy_reed"] = criterion;
  if (criterion > 0.0) {
    report.warnings.push_back("GiantComponentWarning: molloy_reed criterion " +
                              format_number(criterion) + " > 0");
  }

  const DiscreteSampler degrees(law);
  auto config_sizes = run_replicas(reps, opts, stream_base(0), [&](Rng& rng, std::size_t) {
    return arm_cluster_size(degrees, n, rng);
  });

  // Two size-biased GW trees joined by the chosen edge; sizes reaching n are lumped.
  const DiscreteSampler offspring(biased);
  const std::size_t giant = n + 1;
  auto gw_sizes = run_replicas(reps, opts, stream_base(1), [&](Rng& rng, std::size_t) {
    const auto a = try_sample_tree(offspring, rng, n);
    const auto b = try_sample_tree(offspring, rng, n);
    if (!a || !b) return giant;
    return std::min(giant, a->size() + b->size());
  });

  std::map<std::size_t, std::uint64_t> config_counts, gw_counts;
  for (std::size_t s : config_sizes) ++config_counts[s];
  for (std::size_t s : gw_sizes) ++gw_counts[s];
  const auto config_law = normalize_counts(config_counts);
  const auto gw_law = normalize_counts(gw_counts);
  const double tv = tv_distance(config_law, gw_law);
  report.add("cluster_tv", static_cast<double>(n), tv);
  for (const auto& [s, p] : config_law) report.add("config_cluster_pmf", static_cast<double>(s), p);
  for (const auto& [s, p] : gw_law) report.add("joined_gw_pmf", static_cast<double>(s), p);
  report.check("cluster_tv_below_0.02", tv < 0.02, "tv " + format_number(tv));

  // Contrast: a uniformly chosen tree of the grabbing system's terminal
  // forest follows T^(mu), not the arm-biased cluster law.
  const std::size_t contrast_reps = std::min<std::size_t>(reps, 10'000);
  report.parameters["contrast_reps"] = contrast_reps;
  if (law.criticality() != Criticality::supercritical && law.prob(0) > 0.0) {
    const SumConditionedSampler arms_sampler(law, n, 0, n - 1);
    auto uniform_sizes = run_replicas(contrast_reps, opts, stream_base(2),
                                      [&](Rng& rng, std::size_t) {
                                        const ArmVector arms(arms_sampler(rng));
                                        const PlanarForest f = simulate_shape(arms, rng);
                                        const std::size_t i = rng.uniform_below(f.tree_count());
                                        return f.tree_outdegrees(i).size();
                                      });
    std::map<std::size_t, std::uint64_t> uniform_counts;
    for (std::size_t s : uniform_sizes) ++uniform_counts[s];
    const auto uniform_law = normalize_counts(uniform_counts);
    std::size_t largest = uniform_law.rbegin()->first;
    const auto exact = tree_size_pmf(law, largest);
    FiniteLaw<std::size_t> gw_tree_law;
    for (std::size_t s = 1; s <= largest; ++s) {
      if (exact[s] > 0.0) gw_tree_law[s] = exact[s];
    }
    report.add("contrast_tv_uniform_vs_arm", static_cast<double>(n),
               tv_distance(uniform_law, config_law));
    report.add("contrast_tv_uniform_vs_gw_tree", static_cast<double>(n),
               tv_distance(uniform_law, gw_tree_law));
  } else {
    report.warnings.push_back("grabbing-system contrast skipped: needs m <= 1 and mu(0) > 0");
  }
  return report;
}

ExperimentReport dwass_experiment(const FloatLaw& law, std::size_t k, std::size_t reps,
                                  std::size_t cap, const RunOptions& opts) {
  if (k < 1) throw OutOfRange("k must be positive");
  if (cap < 2) throw OutOfRange("cap must be at least 2");
  if (reps < 1) throw OutOfRange("reps must be positive");

  ExperimentReport report = start_report("dwass", law, opts);
  report.parameters["k"] = k;
  report.parameters["reps"] = reps;
  report.parameters["cap"] = cap;

  const DiscreteSampler offspring(law);
  // Size 0 marks a tree stopped at the cap.
  auto forests = run_replicas(reps, opts, stream_base(0), [&](Rng& rng, std::size_t) {
    std::vector<std::size_t> sizes(k, 0);
    for (auto& s : sizes) {
      const auto t = try_sample_tree(offspring, rng, cap);
      s = t ? t->size() : 0;
    }
    return sizes;
  });

  const std::size_t max_size = std::min<std::size_t>(cap - 1, 4096);
  const auto pmf = tree_size_pmf(law, max_size);
  FiniteLaw<std::size_t> expected;
  for (std::size_t s = 1; s <= max_size; ++s) {
    if (pmf[s] > 0.0) expected[s] = pmf[s];
  }

  std::map<std::size_t, std::uint64_t> marginal;
  for (const auto& sizes : forests) {
    for (std::size_t s : sizes) ++marginal[s];
  }
  const std::uint64_t trees = static_cast<std::uint64_t>(k) * reps;
  const ChiSquareResult fit = chi_square_test(marginal, expected, trees);
  const double x = static_cast<double>(k);
  report.add("marginal_statistic", x, fit.statistic);
  report.add("marginal_dof", x, static_cast<double>(fit.dof));
  report.add("marginal_p_value", x, fit.p_value);
  report.check("marginal_p_above_1e-3", fit.p_value > 1e-3, "p " + format_number(fit.p_value));
  for (std::size_t s = 1; s <= std::min<std::size_t>(15, max_size); ++s) {
    const auto it = marginal.find(s);
    const double observed = it == marginal.end() ? 0.0 : static_cast<double>(it->second);
    report.add("size_pmf_empirical", static_cast<double>(s), observed / static_cast<double>(trees));
    report.add("size_pmf_expected", static_cast<double>(s), pmf[s]);
  }

  if (k < 2) {
    report.warnings.push_back("independence test needs k >= 2");
    return report;
  }
  // Sizes common enough that every cell of the product table expects at
  // least 5 observations; the rest share one category.
  const double threshold = std::sqrt(kMinExpectedCount / static_cast<double>(reps));
  std::map<std::size_t, std::size_t> category;
  for (const auto& [s, p] : expected) {
    if (p >= threshold) category.emplace(s, category.size());
  }
  const std::size_t other = category.size();
  auto cat = [&](std::size_t s) {
    const auto it = category.find(s);
    return it == category.end() ? other : it->second;
  };
  std::vector<std::vector<std::uint64_t>> table(other + 1,
                                                std::vector<std::uint64_t>(other + 1, 0));
  for (const auto& sizes : forests) ++table[cat(sizes[0])][cat(sizes[1])];
  const ChiSquareResult indep = chi_square_independence(table);
  report.add("independence_statistic", x, indep.statistic);
  report.add("independence_dof", x, static_cast<double>(indep.dof));
  report.add("independence_p_value", x, indep.p_value);
  report.check("independence_p_above_1e-3", indep.p_value > 1e-3,
               "p " + format_number(indep.p_value));
  return report;
}

ExperimentReport conditioned_sampler_comparison(const FloatLaw& law, std::size_t k,
                                                std::size_t n, std::size_t samples,
                                                const RunOptions& opts) {
  const ConditionedForestSampler sampler({law, k, n});
  ExperimentReport report = start_report("conditioned_sampler", law, opts);
  report.parameters["k"] = k;
  report.parameters["n"] = n;
  report.parameters["samples"] = samples;

  auto direct = run_replicas(samples, opts, stream_base(0), [&](Rng& rng, std::size_t) {
    return sampler(rng).to_string();
  });

  const DiscreteSampler offspring(law);
  auto rejected = run_replicas(samples, opts, stream_base(1), [&](Rng& rng, std::size_t) {
    std::vector<PlanarTree> trees;
    for (std::size_t attempt = 0; attempt < 10'000'000; ++attempt) {
      trees.clear();
      std::size_t total = 0;
      bool ok = true;
      for (std::size_t i = 0; i < k && ok; ++i) {
        auto t = try_sample_tree(offspring, rng, n - total + 1);
        if (!t || total + t->size() > n) {
          ok = false;
        } else {
          total += t->size();
          trees.push_back(std::move(*t));
        }
      }
      if (ok && total == n) return PlanarForest::from_trees(trees).to_string();
    }
    throw BudgetExceeded("rejection sampler did not hit the target size", 0);
  });

  std::map<std::string, std::uint64_t> a, b;
  for (const auto& s : direct) ++a[s];
  for (const auto& s : rejected) ++b[s];
  const auto pa = normalize_counts(a);
  const auto pb = normalize_counts(b);
  const double tv = tv_distance(pa, pb);
  report.add("tv_sampler_vs_rejection", static_cast<double>(n), tv);
  report.add("distinct_forests_sampler", static_cast<double>(n), static_cast<double>(pa.size()));
  report.add("distinct_forests_rejection", static_cast<double>(n),
             static_cast<double>(pb.size()));
  report.add("acceptance_rejection", static_cast<double>(n), first_passage_pmf(law, k, n));
  report.check("tv_below_0.01", tv < 0.01, "tv " + format_number(tv));
  return report;
}

ExperimentReport cyclic_shift_check(std::size_t sequences, std::size_t max_n,
                                   const RunOptions& opts) {
  if (max_n < 1) throw OutOfRange("max_n must be positive");
  ExperimentReport report;
  report.experiment = "cyclic_shifts";
  report.parameters["sequences"] = sequences;
  report.parameters["max_n"] = max_n;
  report.parameters["rng"] = rng_json(opts);

  auto ok = run_replicas(sequences, opts, stream_base(0), [&](Rng& rng, std::size_t) {
    const std::size_t n = 1 + rng.uniform_below(max_n);
    const std::size_t k = 1 + rng.uniform_below(n);
    std::vector<Degree> degrees(n, 0);
    for (std::size_t arm = 0; arm < n - k; ++arm) ++degrees[rng.uniform_below(n)];
    const auto shifts = valid_shifts(degrees, k);
    if (shifts.size() != k) return false;
    // Each reported rotation must really first reach -k at its end, and
    // no other rotation may.
    std::size_t valid = 0;
    std::vector<Degree> rotated(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < n; ++i) rotated[(i + r) % n] = degrees[i];
      const bool hit = LukasiewiczWalk(rotated).first_passage(k) == n;
      const bool listed = std::ranges::find(shifts, r) != shifts.end();
      if (hit != listed) return false;
      valid += hit;
    }
    return valid == k;
  });
  const auto failures = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), false));
  report.add("sequences", static_cast<double>(max_n), static_cast<double>(sequences));
  report.add("failures", static_cast<double>(max_n), static_cast<double>(failures));
  report.check("exactly_k_valid_shifts", failures == 0,
               std::to_string(failures) + " failing sequences");
  return report;
}

ExperimentReport conditioned_shape_monte_carlo(const RationalLaw& law, std::size_t k, std::size_t n,
                                      std::size_t reps, const RunOptions& opts) {
  const ExactLaw exact = exact_conditional_gw(law, k, n);
  const FloatLaw flaw = law.to_double();
  ExperimentReport report = start_report("verify-theorem1-mc", flaw, opts);
  report.parameters["k"] = k;
  report.parameters["n"] = n;
  report.parameters["reps"] = reps;

  const SumConditionedSampler arms_sampler(flaw, n, n - k, n - k);
  auto shapes = run_replicas(reps, opts, stream_base(0), [&](Rng& rng, std::size_t) {
    const ArmVector arms(arms_sampler(rng));
    return shape_of(simulate_terminal(arms, rng)).to_string();
  });

  std::map<std::string, std::uint64_t> observed;
  for (const auto& s : shapes) ++observed[s];
  FiniteLaw<std::string> expected;
  std::vector<std::string> order;
  for (const auto& [key, p] : exact.outcomes) {
    expected[key] = to_double(p);
    order.push_back(key);
  }
  report.parameters["shapes"] = order;

  const ChiSquareResult fit = chi_square_test(observed, expected, reps);
  const double x = static_cast<double>(n);
  report.add("chi_square_statistic", x, fit.statistic);
  report.add("chi_square_dof", x, static_cast<double>(fit.dof));
  report.add("chi_square_p_value", x, fit.p_value);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto it = observed.find(order[i]);
    const double freq = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    report.add("frequency", static_cast<double>(i), freq / static_cast<double>(reps));
    report.add("exact", static_cast<double>(i), expected[order[i]]);
  }
  std::size_t outside = 0;
  for (const auto& [key, count] : observed) {
    if (!expected.count(key)) outside += count;
  }
  report.check("no_shape_outside_support", outside == 0);
  report.check("chi_square_p_above_1e-3", fit.p_value > 1e-3, "p " + format_number(fit.p_value));
  return report;
}

}  // namespace grabforest
