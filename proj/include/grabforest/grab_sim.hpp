#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grabforest/forest.hpp"
#include "grabforest/law.hpp"
#include "grabforest/random.hpp"

namespace grabforest {

// Initial arm counts x_1..x_n with x_1 + ... + x_n = n - k, 1 <= k <= n.
class ArmVector {
 public:
  // Throws InvalidArms if n < 2 or the arms leave no root (k <= 0).
  explicit ArmVector(std::vector<Degree> counts);

  std::span<const Degree> counts() const { return counts_; }
  std::size_t n() const { return counts_.size(); }
  std::size_t total_arms() const { return total_; }
  std::size_t k() const { return counts_.size() - total_; }

  // FNV-1a 64 of the counts, as 16 hex digits.
  std::string digest() const;
  std::string to_string() const;

  bool operator==(const ArmVector&) const = default;

 private:
  std::vector<Degree> counts_;
  std::size_t total_ = 0;
};

// "2,0,0" -> ArmVector.
ArmVector parse_arms(std::string_view text);

// Terminal state together with the initial left-to-right axis order, which
// the terminal forest alone does not retain.
struct Trajectory {
  ArmVector arms;
  std::vector<std::uint32_t> axis_order;  // particle labels, left to right at time 0
  LabeledForest terminal;
};

// Runs the grabbing dynamics to completion:
//  * particles start on the axis in a uniformly random order;
//  * arms fire in a uniformly random order, the l-th activation labels its
//    edge l;
//  * the firing arm grabs a root chosen uniformly among the roots outside
//    its own cluster, and the grabbed cluster hangs from the arm's slot.
// All three entry points consume the generator identically, so for a given
// (arms, seed) shape_of(simulate_terminal(...)) == simulate_shape(...).
Trajectory simulate_trajectory(const ArmVector& arms, Rng& rng);
LabeledForest simulate_terminal(const ArmVector& arms, Rng& rng);
// Shape mode: skips label bookkeeping.
PlanarForest simulate_shape(const ArmVector& arms, Rng& rng);

struct GrabEdge {
  std::uint32_t from;   // grabbing particle
  std::uint32_t to;     // grabbed particle
  std::uint32_t label;  // activation time
  std::uint32_t slot;   // 0-based arm slot on `from`, left to right
  bool operator==(const GrabEdge&) const = default;
};

struct SystemState {
  std::size_t time = 0;
  std::vector<std::uint32_t> roots;          // axis order
  std::vector<std::uint32_t> cluster_root;   // [label - 1] -> root label
  std::vector<Degree> remaining_arms;        // [label - 1]
  std::vector<GrabEdge> edges;               // sorted by label

  // Clusters as sorted label lists, ordered like `roots`.
  std::vector<std::vector<std::uint32_t>> clusters() const;
};

// State after the first `time` activations, recovered by pruning the edges
// labeled time+1..n-k. Throws OutOfRange if time > n - k.
SystemState state_at(const Trajectory& trajectory, std::size_t time);

// i.i.d. counts from `law`, resampled until they sum to at most n - 1.
// Throws ConditioningImpossible when the event has probability zero or the
// rejection budget runs out.
ArmVector sample_conditioned_arms(const FloatLaw& law, std::size_t n, Rng& rng,
                                  std::size_t budget = 1'000'000);

}  // namespace grabforest
