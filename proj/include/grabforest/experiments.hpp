#pragma once

#include <cstddef>
#include <vector>

#include "grabforest/forest.hpp"
#include "grabforest/grab_sim.hpp"
#include "grabforest/law.hpp"
#include "grabforest/replicas.hpp"
#include "grabforest/report.hpp"

namespace grabforest {

// ---- Monte Carlo experiments ---------------------------------------------
//
// Every experiment is a pure function of its arguments: replica r of
// configuration c draws from Rng(seed, stream_base(c) + r), and results are
// reduced in replica order.

// Squared deviation of the proportion of trees equal to `tree` from its GW
// probability, for arms conditioned on leaving at least one root. Throws
// HypothesisViolated if the law is supercritical or mu(0) = 0.
ExperimentReport theorem2_experiment(const FloatLaw& law, const PlanarTree& tree,
                                     const std::vector<std::size_t>& n_list, std::size_t reps,
                                     const RunOptions& opts);

// Probability that the two leftmost trees are (t1, t2) and at least three
// trees remain, from the exact finite-n mixture over k (float arithmetic).
double pair_probability_finite_n(const FloatLaw& law, const PlanarTree& t1,
                                 const PlanarTree& t2, std::size_t n);

// Monte Carlo estimate of the same event, compared with both the limiting
// product and the finite-n value.
ExperimentReport pair_factorization_experiment(const FloatLaw& law, const PlanarTree& t1,
                                               const PlanarTree& t2,
                                               const std::vector<std::size_t>& n_list,
                                               std::size_t reps, const RunOptions& opts);

inline const std::vector<std::size_t> kDefaultTreeCountGrid = {1, 5, 10, 20, 50};

// P(k(n) >= K) over a grid of K; for subcritical laws also k(n)/n vs 1 - m.
ExperimentReport tree_count_experiment(const FloatLaw& law,
                                       const std::vector<std::size_t>& n_list,
                                       std::size_t reps, const RunOptions& opts,
                                       const std::vector<std::size_t>& grid =
                                           kDefaultTreeCountGrid);

// P(S_n <= n - ell) / P(S_n <= n), evaluated exactly (no sampling). Throws
// HypothesisViolated unless critical, PeriodicSupport if the support lies on
// a proper sublattice.
ExperimentReport ratio_limit_check(const FloatLaw& law, const std::vector<std::size_t>& n_list,
                                   std::size_t ell);

// Law of k(n) given k(n) >= 1 for a supercritical law, with a geometric fit
// on its lattice, plus the tilted check k(n)/n ~ c under the law tilted to
// mean 1 - c. Throws HypothesisViolated if m <= 1 or mu(0) = 0.
ExperimentReport supercritical_k_experiment(const FloatLaw& law,
                                            const std::vector<std::size_t>& n_list,
                                            std::size_t reps, double c,
                                            const RunOptions& opts);

// Cluster size of a uniform arm in the configuration model with n i.i.d.
// degrees, against |t'| + |t''| for two independent GW(size-biased) trees.
// Throws ZeroMean when the law has no arms at all.
ExperimentReport config_model_cluster_experiment(const FloatLaw& law, std::size_t n,
                                                 std::size_t reps, const RunOptions& opts);

// Free GW forest with k trees: tree-size marginal against P(T_1 = s) and
// independence of the first two sizes. Trees reaching `cap` vertices count
// in a tail cell.
ExperimentReport dwass_experiment(const FloatLaw& law, std::size_t k, std::size_t reps,
                                  std::size_t cap, const RunOptions& opts);

// Full pipeline at fixed (k, n): arms conditioned to sum to n - k, labeled
// dynamics, shape, then chi-square against the exact conditioned GW law.
ExperimentReport conditioned_shape_monte_carlo(const RationalLaw& law, std::size_t k, std::size_t n,
                                      std::size_t reps, const RunOptions& opts);

// Conditioned forest sampler (cyclic shift construction) against naive rejection on k free
// trees, by total variation of the two empirical laws.
ExperimentReport conditioned_sampler_comparison(const FloatLaw& law, std::size_t k,
                                                std::size_t n, std::size_t samples,
                                                const RunOptions& opts);

// Random outdegree sequences: every one has exactly k valid shifts.
ExperimentReport cyclic_shift_check(std::size_t sequences, std::size_t max_n,
                                   const RunOptions& opts);

// P(T_1 = s) for s = 1..max_size by incremental convolution powers.
std::vector<double> tree_size_pmf(const FloatLaw& law, std::size_t max_size);

// ---- Exact verifications ---------------------------------------------------

// Exact terminal law vs uniform law on the labeled forests of arms.
ExperimentReport verify_uniform_terminal_law(const ArmVector& arms);

// Every arm vector with 2 <= n <= max_n and total arms <= max_arms.
ExperimentReport verify_uniform_terminal_law_exhaustive(std::size_t max_n, std::size_t max_arms);

// For all feasible (k, n) with n <= max_n: the conditioned mixture of
// terminal shape laws equals the exact conditioned GW law. The mixture is
// built from the uniform labeled-forest route. `dynamics` adds the slower
// expansion of the dynamics as a second route.
ExperimentReport verify_conditioned_shape_law(const RationalLaw& law, std::size_t max_n,
                                              bool dynamics);

// First passage probabilities for 1 <= k < n <= n_max. The closed form
// (k / n) P(S_n = n - k) must agree exactly with the killed-walk recursion.
// For n <= 10 it must also agree with the enumeration of forests.
ExperimentReport kemperman_check(const RationalLaw& law, std::size_t n_max);

}  // namespace grabforest
