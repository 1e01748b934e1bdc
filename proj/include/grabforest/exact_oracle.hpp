#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "grabforest/forest.hpp"
#include "grabforest/grab_sim.hpp"
#include "grabforest/law.hpp"
#include "grabforest/rational.hpp"

namespace grabforest {

// Exact distribution keyed by canonical text (LabeledForest or PlanarForest
// form). All masses are positive rationals.
struct ExactLaw {
  std::map<std::string, Rational> outcomes;

  Rational total() const;
  bool is_uniform() const;
  // Uniform over exactly these keys?
  bool is_uniform_on(const std::vector<std::string>& keys) const;
  // "outcome,numerator,denominator" rows with a header line.
  std::string to_csv() const;

  bool operator==(const ExactLaw&) const = default;
};

inline constexpr std::size_t kDefaultLabeledBound = 6;
inline constexpr std::size_t kDefaultShapeBound = 7;
inline constexpr std::size_t kDefaultConditionalBound = 10;
inline constexpr std::size_t kMaxEnumeratedTreeSize = 12;

// Expands every random choice of the dynamics (axis order, activation order,
// each grab) and accumulates the exact probability of each labeled terminal
// state. Throws TooLarge if n > max_n.
ExactLaw exact_terminal_law(const ArmVector& arms, std::size_t max_n = kDefaultLabeledBound);

// Shape marginal of the terminal law. The axis order only decides the
// left-to-right order of the surviving roots, which is a uniform ordering
// independent of everything else, so it is collapsed to the k! orderings
// of the final trees.
ExactLaw exact_terminal_shape_law(const ArmVector& arms,
                                  std::size_t max_n = kDefaultShapeBound);

// All labeled plane forests whose vertex i has outdegree x_i.
std::vector<LabeledForest> enumerate_phi(const ArmVector& arms,
                                         std::size_t max_n = kDefaultLabeledBound);

// Plane forests in F_{n,k} with the same outdegree multiset as
// `arms`, i.e. the shapes carried by the labeled forests compatible with them.
std::vector<PlanarForest> shapes_with_degrees(const ArmVector& arms);

// Every forest in F_{n,k} whose outdegrees lie in `allowed` (ascending),
// in lexicographic order of the outdegree sequence.
std::vector<PlanarForest> enumerate_forests(std::size_t n, std::size_t k,
                                            const std::vector<Degree>& allowed);

// sum over F_{n,k} of prod mu(y_i): the GW probability that k ancestors
// have total progeny n.
Rational conditional_gw_mass(const RationalLaw& law, std::size_t k, std::size_t n,
                             std::size_t max_n = kDefaultConditionalBound);

// GW forest with k ancestors conditioned on total size n, normalized by
// first_passage_pmf. Throws Infeasible if that probability is zero.
ExactLaw exact_conditional_gw(const RationalLaw& law, std::size_t k, std::size_t n,
                              std::size_t max_n = kDefaultConditionalBound);

// All plane trees with at most max_size vertices, ordered by size, then
// lexicographically by outdegree sequence.
std::vector<PlanarTree> enumerate_trees(std::size_t max_size);

enum class ShapeRoute {
  uniform_labeled,  // shape marginal of the uniform law on the labeled forests
  dynamics,     // exact_terminal_shape_law(x)
};

// Shape law of the terminal state when the arms are i.i.d. `law`
// conditioned on summing to n - k.
ExactLaw conditioned_terminal_shape_law(const RationalLaw& law, std::size_t k, std::size_t n,
                                        ShapeRoute route);

}  // namespace grabforest
