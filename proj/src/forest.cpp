#include "grabforest/forest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>

#include "grabforest/errors.hpp"

namespace grabforest {

namespace {

std::string join_degrees(std::span<const Degree> ds) {
  std::string out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ds[i]);
  }
  return out;
}

std::string join_labels(const std::vector<std::uint32_t>& ls) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ls[i]);
  }
  return out;
}

}  // namespace

bool is_tree_sequence(std::span<const Degree> outdegrees) {
  if (outdegrees.empty()) return false;
  std::int64_t s = 0;
  for (std::size_t i = 0; i < outdegrees.size(); ++i) {
    s += static_cast<std::int64_t>(outdegrees[i]) - 1;
    if (s < 0) return i + 1 == outdegrees.size();
  }
  return false;
}

PlanarTree::PlanarTree(std::vector<Degree> dfs_outdegrees)
    : degrees_(std::move(dfs_outdegrees)) {
  if (degrees_.empty()) throw InvalidSequence("empty tree sequence", 0);
  std::int64_t s = 0;
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    s += static_cast<std::int64_t>(degrees_[i]) - 1;
    if (s < 0 && i + 1 < degrees_.size()) {
      throw InvalidSequence("walk hits -1 at index " + std::to_string(i + 1) +
                                " before the end of the sequence",
                            i + 1);
    }
  }
  if (s != -1) {
    throw InvalidSequence("walk ends at " + std::to_string(s) + ", expected -1",
                          degrees_.size());
  }
}

std::string PlanarTree::to_string() const { return "(" + join_degrees(degrees_) + ")"; }

PlanarForest PlanarForest::from_trees(std::span<const PlanarTree> trees) {
  if (trees.empty()) throw InvalidSequence("forest needs at least one tree", 0);
  std::vector<Degree> degrees;
  std::vector<std::size_t> starts{0};
  for (const auto& t : trees) {
    auto ds = t.outdegrees();
    degrees.insert(degrees.end(), ds.begin(), ds.end());
    starts.push_back(degrees.size());
  }
  return PlanarForest(std::move(degrees), std::move(starts));
}

PlanarForest PlanarForest::from_parts(std::vector<Degree> degrees,
                                      std::vector<std::size_t> starts) {
  if (starts.size() < 2 || starts.front() != 0 || starts.back() != degrees.size()) {
    throw InvalidSequence("tree offsets do not cover the sequence", 0);
  }
  std::span<const Degree> all(degrees);
  for (std::size_t i = 0; i + 1 < starts.size(); ++i) {
    if (starts[i + 1] <= starts[i] ||
        !is_tree_sequence(all.subspan(starts[i], starts[i + 1] - starts[i]))) {
      throw InvalidSequence("tree " + std::to_string(i + 1) + " is not a plane tree",
                            starts[i] + 1);
    }
  }
  return PlanarForest(std::move(degrees), std::move(starts));
}

std::span<const Degree> PlanarForest::tree_outdegrees(std::size_t i) const {
  return std::span<const Degree>(degrees_).subspan(starts_[i], starts_[i + 1] - starts_[i]);
}

PlanarTree PlanarForest::tree(std::size_t i) const {
  auto ds = tree_outdegrees(i);
  return PlanarTree(std::vector<Degree>(ds.begin(), ds.end()));
}

std::vector<PlanarTree> PlanarForest::trees() const {
  std::vector<PlanarTree> out;
  out.reserve(tree_count());
  for (std::size_t i = 0; i < tree_count(); ++i) out.push_back(tree(i));
  return out;
}

std::string PlanarForest::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < tree_count(); ++i) {
    if (i) out += '|';
    out += join_degrees(tree_outdegrees(i));
  }
  out += ')';
  return out;
}

PlanarForest parse_forest(std::span<const Degree> outdegrees, std::size_t k) {
  if (outdegrees.empty()) throw InvalidSequence("empty sequence", 0);
  if (k == 0) throw InvalidSequence("forest needs k >= 1", 0);
  std::vector<std::size_t> starts{0};
  std::int64_t s = 0;
  const std::size_t n = outdegrees.size();
  for (std::size_t i = 0; i < n; ++i) {
    s += static_cast<std::int64_t>(outdegrees[i]) - 1;
    // Skip-free downwards: the walk reaches each new level exactly.
    if (s == -static_cast<std::int64_t>(starts.size())) {
      starts.push_back(i + 1);
      if (starts.size() - 1 == k && i + 1 < n) {
        throw InvalidSequence("walk hits -" + std::to_string(k) + " at index " +
                                  std::to_string(i + 1) + " < " + std::to_string(n),
                              i + 1);
      }
    }
  }
  if (starts.size() - 1 != k) {
    throw InvalidSequence("walk never reaches -" + std::to_string(k) + " (ends at " +
                              std::to_string(s) + ")",
                          n);
  }
  return PlanarForest(std::vector<Degree>(outdegrees.begin(), outdegrees.end()),
                      std::move(starts));
}

namespace {

std::string strip_spaces(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  return s;
}

std::vector<std::vector<Degree>> parse_groups(const std::string& s) {
  if (s.size() < 2 || s.front() != '(') throw ParseError("expected '('", 0);
  if (s.back() != ')') throw ParseError("expected ')'", s.size() - 1);
  std::vector<std::vector<Degree>> groups(1);
  std::size_t pos = 1;
  const std::size_t end = s.size() - 1;
  while (true) {
    Degree v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + end, v);
    if (ec != std::errc()) throw ParseError("expected outdegree", pos);
    groups.back().push_back(v);
    pos = static_cast<std::size_t>(ptr - s.data());
    if (pos == end) break;
    if (s[pos] == '|') {
      groups.emplace_back();
    } else if (s[pos] != ',') {
      throw ParseError("expected ',' or '|'", pos);
    }
    ++pos;
  }
  return groups;
}

}  // namespace

PlanarForest parse_forest_text(std::string_view text) {
  std::vector<PlanarTree> trees;
  for (auto& g : parse_groups(strip_spaces(text))) trees.emplace_back(std::move(g));
  return PlanarForest::from_trees(trees);
}

PlanarTree parse_tree_text(std::string_view text) {
  auto groups = parse_groups(strip_spaces(text));
  if (groups.size() != 1) throw ParseError("expected a single tree", 0);
  return PlanarTree(std::move(groups.front()));
}

LukasiewiczWalk::LukasiewiczWalk(std::span<const Degree> outdegrees) {
  sums_.reserve(outdegrees.size() + 1);
  sums_.push_back(0);
  for (Degree d : outdegrees) sums_.push_back(sums_.back() + static_cast<std::int64_t>(d) - 1);
}

std::optional<std::size_t> LukasiewiczWalk::first_passage(std::size_t level) const {
  const auto target = -static_cast<std::int64_t>(level);
  for (std::size_t l = 1; l < sums_.size(); ++l) {
    if (sums_[l] == target) return l;
  }
  return std::nullopt;
}

void LabeledForest::validate() const {
  const std::size_t n = shape.vertex_count();
  const std::size_t k = shape.tree_count();
  if (vertex_labels.size() != n || edge_labels.size() != n) {
    throw InvalidLabels("label arrays must have one entry per vertex");
  }
  std::vector<bool> seen_v(n + 1, false), seen_e(n - k + 1, false);
  std::vector<bool> is_root(n, false);
  for (std::size_t t = 0; t < k; ++t) is_root[shape.tree_start(t)] = true;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = vertex_labels[i];
    if (v < 1 || v > n || seen_v[v]) throw InvalidLabels("vertex labels are not a bijection onto 1..n");
    seen_v[v] = true;
    auto e = edge_labels[i];
    if (is_root[i]) {
      if (e != 0) throw InvalidLabels("root carries an edge label");
    } else {
      if (e < 1 || e > n - k || seen_e[e]) {
        throw InvalidLabels("edge labels are not a bijection onto 1..n-k");
      }
      seen_e[e] = true;
    }
  }
}

std::vector<Degree> LabeledForest::outdegree_by_label() const {
  auto ds = shape.outdegrees();
  std::vector<Degree> out(ds.size(), 0);
  for (std::size_t i = 0; i < ds.size(); ++i) out[vertex_labels[i] - 1] = ds[i];
  return out;
}

std::vector<std::size_t> LabeledForest::parent_positions() const {
  auto ds = shape.outdegrees();
  std::vector<std::size_t> parent(ds.size(), npos);
  // Stack of (position, children still to attach).
  std::vector<std::pair<std::size_t, Degree>> open;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    while (!open.empty() && open.back().second == 0) open.pop_back();
    if (!open.empty()) {
      parent[i] = open.back().first;
      --open.back().second;
    }
    open.emplace_back(i, ds[i]);
  }
  return parent;
}

std::string LabeledForest::to_string() const {
  return shape.to_string() + "#" + join_labels(vertex_labels) + "#" + join_labels(edge_labels);
}

PlanarForest shape_of(const LabeledForest& f) { return f.shape; }

}  // namespace grabforest
