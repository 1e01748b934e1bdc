#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grabforest/law.hpp"

namespace grabforest {

// Plane (ordered, rooted, unlabeled) tree stored as its depth-first
// outdegree sequence. Always satisfies the Lukasiewicz condition.
class PlanarTree {
 public:
  // Throws InvalidSequence if the sequence does not encode exactly one tree.
  explicit PlanarTree(std::vector<Degree> dfs_outdegrees);

  static PlanarTree single_vertex() { return PlanarTree({0}); }

  std::span<const Degree> outdegrees() const { return degrees_; }
  std::size_t size() const { return degrees_.size(); }

  // Text form, e.g. "(2,0,0)".
  std::string to_string() const;

  bool operator==(const PlanarTree&) const = default;
  auto operator<=>(const PlanarTree&) const = default;

 private:
  std::vector<Degree> degrees_;
};

// Ordered sequence of k plane trees, stored flat: the concatenated
// depth-first outdegrees plus the offset of each tree.
class PlanarForest {
 public:
  static PlanarForest from_trees(std::span<const PlanarTree> trees);
  // Flat construction; each [starts[i], starts[i+1]) must be a tree.
  static PlanarForest from_parts(std::vector<Degree> degrees,
                                 std::vector<std::size_t> starts);

  std::size_t tree_count() const { return starts_.size() - 1; }
  std::size_t vertex_count() const { return degrees_.size(); }
  std::span<const Degree> outdegrees() const { return degrees_; }
  std::span<const Degree> tree_outdegrees(std::size_t i) const;
  std::size_t tree_start(std::size_t i) const { return starts_[i]; }
  PlanarTree tree(std::size_t i) const;
  std::vector<PlanarTree> trees() const;

  // Text form, e.g. "(1,2,1,0,0|1,0)".
  std::string to_string() const;

  bool operator==(const PlanarForest&) const = default;

 private:
  friend PlanarForest parse_forest(std::span<const Degree>, std::size_t);
  PlanarForest(std::vector<Degree> degrees, std::vector<std::size_t> starts)
      : degrees_(std::move(degrees)), starts_(std::move(starts)) {}

  std::vector<Degree> degrees_;
  std::vector<std::size_t> starts_;  // size k + 1, last == vertex_count()
};

// Splits a depth-first outdegree listing into k trees at the walk's
// successive passage times to -1, ..., -k. Throws InvalidSequence (1-based
// index) when the first passage to -k is not at the final index.
PlanarForest parse_forest(std::span<const Degree> outdegrees, std::size_t k);

// Text format parsers. Whitespace-insensitive.
PlanarForest parse_forest_text(std::string_view text);
PlanarTree parse_tree_text(std::string_view text);

// Partial sums S_l of (y_i - 1), with S_0 = 0.
class LukasiewiczWalk {
 public:
  explicit LukasiewiczWalk(std::span<const Degree> outdegrees);

  std::span<const std::int64_t> partial_sums() const { return sums_; }
  std::size_t length() const { return sums_.size() - 1; }
  std::int64_t step(std::size_t i) const { return sums_[i] - sums_[i - 1]; }
  // First l >= 1 with S_l = -level, if any.
  std::optional<std::size_t> first_passage(std::size_t level) const;

 private:
  std::vector<std::int64_t> sums_;
};

bool is_tree_sequence(std::span<const Degree> outdegrees);

// Product of law probabilities over the outdegrees; zero when some degree is
// outside the support. Multiplicative over the trees of a forest.
template <class P>
P tree_probability(const ReproductionLaw<P>& law, std::span<const Degree> outdegrees) {
  P p = 1;
  for (Degree d : outdegrees) {
    p *= law.prob(d);
    if (p == 0) break;
  }
  return p;
}

template <class P>
P tree_probability(const ReproductionLaw<P>& law, const PlanarTree& t) {
  return tree_probability(law, t.outdegrees());
}

template <class P>
P forest_probability(const ReproductionLaw<P>& law, const PlanarForest& f) {
  return tree_probability(law, f.outdegrees());
}

// Plane forest with vertex labels 1..n and edge labels 1..n-k.
//
// Labels are indexed by depth-first position in the shape. The edge label
// at a position is the label of the edge entering that vertex; roots carry
// 0.
struct LabeledForest {
  PlanarForest shape;
  std::vector<std::uint32_t> vertex_labels;
  std::vector<std::uint32_t> edge_labels;

  // Throws InvalidLabels unless both label maps are bijections of the
  // right size.
  void validate() const;

  // Outdegree of each vertex label: out[i - 1] = d_i.
  std::vector<Degree> outdegree_by_label() const;

  // Parent depth-first position of every position (npos for roots).
  std::vector<std::size_t> parent_positions() const;

  // "<shape>#<vertex labels>#<edge labels>", e.g. "(1,0)#2,1#0,1".
  std::string to_string() const;

  bool operator==(const LabeledForest&) const = default;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

PlanarForest shape_of(const LabeledForest& f);

}  // namespace grabforest
