#include "grabforest/grab_sim.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cstdio>
#include <numeric>

#include "grabforest/errors.hpp"

namespace grabforest {

ArmVector::ArmVector(std::vector<Degree> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) throw InvalidArms("need at least 2 particles");
  for (Degree d : counts_) total_ += d;
  if (total_ >= counts_.size()) {
    throw InvalidArms("total arms " + std::to_string(total_) + " must be < n = " +
                      std::to_string(counts_.size()));
  }
}

std::string ArmVector::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Degree d : counts_) {
    for (int b = 0; b < 4; ++b) {
      h ^= (d >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ArmVector::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(counts_[i]);
  }
  return out;
}

ArmVector parse_arms(std::string_view text) {
  std::vector<Degree> counts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    auto item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    Degree v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ParseError("bad arm count", pos);
    }
    counts.push_back(v);
    pos = comma + 1;
  }
  return ArmVector(std::move(counts));
}

namespace {

// Union-find over particles with a cluster -> current root map.
class Clusters {
 public:
  explicit Clusters(std::size_t n) : parent_(n), size_(n, 1), root_(n) {
    std::iota(parent_.begin(), parent_.end(), 0U);
    std::iota(root_.begin(), root_.end(), 0U);
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  std::uint32_t root_particle(std::uint32_t x) { return root_[find(x)]; }

  // The grabbed cluster joins the grabber's, which keeps its root.
  void attach(std::uint32_t grabber, std::uint32_t grabbed) {
    auto a = find(grabber);
    auto b = find(grabbed);
    const auto keep = root_[a];
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    root_[a] = keep;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> root_;
};

struct RawTerminal {
  std::vector<std::uint32_t> axis_order;   // 0-based particles
  std::vector<std::uint32_t> slot_offset;  // size n + 1
  std::vector<std::uint32_t> child;        // [slot_offset[p] + s] -> grabbed
  std::vector<std::uint32_t> edge_label;   // per particle, 0 for roots
  std::vector<std::uint32_t> roots;        // final roots, axis order
};

RawTerminal run_dynamics(const ArmVector& arms, Rng& rng) {
  const auto counts = arms.counts();
  const auto n = static_cast<std::uint32_t>(arms.n());
  const auto total = static_cast<std::uint32_t>(arms.total_arms());

  RawTerminal out;
  out.axis_order.resize(n);
  std::iota(out.axis_order.begin(), out.axis_order.end(), 0U);
  shuffle(out.axis_order, rng);
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t pos = 0; pos < n; ++pos) rank[out.axis_order[pos]] = pos;

  out.slot_offset.resize(n + 1, 0);
  for (std::uint32_t p = 0; p < n; ++p) out.slot_offset[p + 1] = out.slot_offset[p] + counts[p];
  std::vector<std::uint32_t> owner(total);
  for (std::uint32_t p = 0; p < n; ++p) {
    std::fill(owner.begin() + out.slot_offset[p], owner.begin() + out.slot_offset[p + 1], p);
  }

  // Global arm ids double as slot addresses; activation order is drawn
  // lazily by Fisher-Yates over this array.
  std::vector<std::uint32_t> order(total);
  std::iota(order.begin(), order.end(), 0U);

  std::vector<std::uint32_t> roots(n), where(n);
  std::iota(roots.begin(), roots.end(), 0U);
  std::iota(where.begin(), where.end(), 0U);

  out.child.assign(total, 0);
  out.edge_label.assign(n, 0);
  Clusters clusters(n);

  for (std::uint32_t step = 0; step < total; ++step) {
    const auto j = step + static_cast<std::uint32_t>(rng.uniform_below(total - step));
    std::swap(order[step], order[j]);
    const auto arm = order[step];
    const auto grabber = owner[arm];
    const auto own_root = clusters.root_particle(grabber);

    const auto live = static_cast<std::uint32_t>(roots.size());
    assert(live == n - step);
    assert(live >= 2);  // eligible count n - step - 1 > 0
    // Uniform over live - 1 roots: skip over the grabber's own root.
    auto pick = static_cast<std::uint32_t>(rng.uniform_below(live - 1));
    if (pick >= where[own_root]) ++pick;
    const auto target = roots[pick];

    out.child[arm] = target;
    out.edge_label[target] = step + 1;
    const auto last = roots.back();
    roots[where[target]] = last;
    where[last] = where[target];
    roots.pop_back();
    clusters.attach(grabber, target);
  }

  std::sort(roots.begin(), roots.end(),
            [&](std::uint32_t a, std::uint32_t b) { return rank[a] < rank[b]; });
  out.roots = std::move(roots);
  return out;
}

// Depth-first listing of the terminal forest, children in slot order.
template <class Visit>
void depth_first(const RawTerminal& raw, std::span<const Degree> counts, Visit&& visit) {
  std::vector<std::uint32_t> stack;
  for (auto r : raw.roots) {
    visit.begin_tree();
    stack.push_back(r);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      visit.vertex(v);
      for (auto s = counts[v]; s > 0; --s) stack.push_back(raw.child[raw.slot_offset[v] + s - 1]);
    }
  }
}

struct ShapeBuilder {
  std::span<const Degree> counts;
  std::vector<Degree> degrees;
  std::vector<std::size_t> starts;
  void begin_tree() { starts.push_back(degrees.size()); }
  void vertex(std::uint32_t v) { degrees.push_back(counts[v]); }
};

struct LabelBuilder {
  std::span<const Degree> counts;
  const std::vector<std::uint32_t>& edge_label;
  std::vector<Degree> degrees;
  std::vector<std::size_t> starts;
  std::vector<std::uint32_t> vertex_labels;
  std::vector<std::uint32_t> edge_labels;
  void begin_tree() { starts.push_back(degrees.size()); }
  void vertex(std::uint32_t v) {
    degrees.push_back(counts[v]);
    vertex_labels.push_back(v + 1);
    edge_labels.push_back(edge_label[v]);
  }
};

LabeledForest labeled_from_raw(const RawTerminal& raw, const ArmVector& arms) {
  LabelBuilder b{arms.counts(), raw.edge_label, {}, {}, {}, {}};
  b.degrees.reserve(arms.n());
  b.vertex_labels.reserve(arms.n());
  b.edge_labels.reserve(arms.n());
  depth_first(raw, arms.counts(), b);
  b.starts.push_back(b.degrees.size());
  return LabeledForest{PlanarForest::from_parts(std::move(b.degrees), std::move(b.starts)),
                       std::move(b.vertex_labels), std::move(b.edge_labels)};
}

}  // namespace

Trajectory simulate_trajectory(const ArmVector& arms, Rng& rng) {
  auto raw = run_dynamics(arms, rng);
  std::vector<std::uint32_t> axis(raw.axis_order.size());
  std::transform(raw.axis_order.begin(), raw.axis_order.end(), axis.begin(),
                 [](std::uint32_t p) { return p + 1; });
  auto terminal = labeled_from_raw(raw, arms);
  return Trajectory{arms, std::move(axis), std::move(terminal)};
}

LabeledForest simulate_terminal(const ArmVector& arms, Rng& rng) {
  return labeled_from_raw(run_dynamics(arms, rng), arms);
}

PlanarForest simulate_shape(const ArmVector& arms, Rng& rng) {
  auto raw = run_dynamics(arms, rng);
  ShapeBuilder b{arms.counts(), {}, {}};
  b.degrees.reserve(arms.n());
  b.starts.reserve(raw.roots.size() + 1);
  depth_first(raw, arms.counts(), b);
  b.starts.push_back(b.degrees.size());
  return PlanarForest::from_parts(std::move(b.degrees), std::move(b.starts));
}

std::vector<std::vector<std::uint32_t>> SystemState::clusters() const {
  std::vector<std::vector<std::uint32_t>> out(roots.size());
  std::vector<std::size_t> index(cluster_root.size() + 1, 0);
  for (std::size_t i = 0; i < roots.size(); ++i) index[roots[i]] = i;
  for (std::uint32_t label = 1; label <= cluster_root.size(); ++label) {
    out[index[cluster_root[label - 1]]].push_back(label);
  }
  return out;
}

SystemState state_at(const Trajectory& trajectory, std::size_t time) {
  const auto& f = trajectory.terminal;
  const std::size_t n = f.shape.vertex_count();
  const std::size_t edges_total = n - f.shape.tree_count();
  if (time > edges_total) {
    throw OutOfRange("time " + std::to_string(time) + " exceeds n - k = " +
                     std::to_string(edges_total));
  }
  auto parent_pos = f.parent_positions();
  auto degrees = f.shape.outdegrees();

  SystemState state;
  state.time = time;
  state.remaining_arms.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) state.remaining_arms[f.vertex_labels[i] - 1] = degrees[i];

  std::vector<std::uint32_t> parent_label(n + 1, 0);
  std::vector<std::uint32_t> next_slot(n, 0);  // by position
  for (std::size_t i = 0; i < n; ++i) {
    if (parent_pos[i] == LabeledForest::npos) continue;
    const auto slot = next_slot[parent_pos[i]]++;
    if (f.edge_labels[i] > time) continue;
    const auto from = f.vertex_labels[parent_pos[i]];
    const auto to = f.vertex_labels[i];
    state.edges.push_back({from, to, f.edge_labels[i], slot});
    parent_label[to] = from;
    --state.remaining_arms[from - 1];
  }
  std::sort(state.edges.begin(), state.edges.end(),
            [](const GrabEdge& a, const GrabEdge& b) { return a.label < b.label; });

  state.cluster_root.assign(n, 0);
  for (std::uint32_t label = 1; label <= n; ++label) {
    auto r = label;
    while (parent_label[r] != 0) r = parent_label[r];
    state.cluster_root[label - 1] = r;
  }
  for (auto label : trajectory.axis_order) {
    if (parent_label[label] == 0) state.roots.push_back(label);
  }
  return state;
}

ArmVector sample_conditioned_arms(const FloatLaw& law, std::size_t n, Rng& rng,
                                  std::size_t budget) {
  if (n < 2) throw InvalidArms("need at least 2 particles");
  if (law.min_value() >= 1) {
    throw ConditioningImpossible("every particle has an arm, so k(n) <= 0 surely");
  }
  DiscreteSampler draw(law);
  std::vector<Degree> counts(n);
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    std::size_t total = 0;
    for (auto& c : counts) {
      c = draw(rng);
      total += c;
    }
    if (total <= n - 1) return ArmVector(counts);
  }
  throw ConditioningImpossible("no draw with k(n) >= 1 in " + std::to_string(budget) +
                               " attempts");
}

}  // namespace grabforest
