#include "grabforest/exact_oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "grabforest/errors.hpp"
#include "grabforest/gw_sampler.hpp"

namespace grabforest {

Rational ExactLaw::total() const {
  Rational t = 0;
  for (const auto& [key, p] : outcomes) t += p;
  return t;
}

bool ExactLaw::is_uniform() const {
  if (outcomes.empty()) return false;
  const Rational& first = outcomes.begin()->second;
  return std::all_of(outcomes.begin(), outcomes.end(),
                     [&](const auto& kv) { return kv.second == first; });
}

bool ExactLaw::is_uniform_on(const std::vector<std::string>& keys) const {
  if (keys.size() != outcomes.size()) return false;
  const Rational expected(1, static_cast<unsigned long>(keys.size()));
  for (const auto& key : keys) {
    auto it = outcomes.find(key);
    if (it == outcomes.end() || it->second != expected) return false;
  }
  return true;
}

std::string ExactLaw::to_csv() const {
  std::string out = "outcome,numerator,denominator\n";
  for (const auto& [key, p] : outcomes) {
    out += '"' + key + "\"," + p.get_num().get_str() + ',' + p.get_den().get_str() + '\n';
  }
  return out;
}

namespace {

Rational factorial(std::size_t m) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), m);
  return Rational(f);
}

// Mutable configuration of the grabbing system for exhaustive expansion.
class Expansion {
 public:
  explicit Expansion(const ArmVector& arms)
      : counts_(arms.counts().begin(), arms.counts().end()),
        n_(arms.n()),
        total_(arms.total_arms()),
        slot_offset_(n_ + 1, 0),
        parent_(n_, kNone),
        child_(total_, kNone),
        edge_label_(n_, 0) {
    for (std::size_t p = 0; p < n_; ++p) slot_offset_[p + 1] = slot_offset_[p] + counts_[p];
    for (std::size_t p = 0; p < n_; ++p) {
      for (std::size_t s = 0; s < counts_[p]; ++s) owner_.push_back(p);
    }
  }

  // Calls leaf(probability) once per terminal configuration reached by
  // each activation order and grab sequence, with probability
  // 1/(n-k)! * prod 1/(n - l - 1).
  template <class Leaf>
  void run(Leaf&& leaf) {
    std::vector<std::size_t> order(total_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const Rational per_order = 1 / factorial(total_);
    do {
      grab(order, 0, per_order, leaf);
    } while (std::next_permutation(order.begin(), order.end()));
  }

  std::vector<std::size_t> roots() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < n_; ++p) {
      if (parent_[p] == kNone) out.push_back(p);
    }
    return out;
  }

  // Depth-first positions of the tree rooted at r.
  void append_tree(std::size_t r, std::vector<Degree>& degrees,
                   std::vector<std::uint32_t>* vertex_labels,
                   std::vector<std::uint32_t>* edge_labels) const {
    std::vector<std::size_t> stack{r};
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      degrees.push_back(counts_[v]);
      if (vertex_labels) vertex_labels->push_back(static_cast<std::uint32_t>(v + 1));
      if (edge_labels) edge_labels->push_back(edge_label_[v]);
      for (auto s = counts_[v]; s > 0; --s) stack.push_back(child_[slot_offset_[v] + s - 1]);
    }
  }

  std::size_t n() const { return n_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::size_t root_of(std::size_t p) const {
    while (parent_[p] != kNone) p = parent_[p];
    return p;
  }

  template <class Leaf>
  void grab(const std::vector<std::size_t>& order, std::size_t step, const Rational& prob,
            Leaf& leaf) {
    if (step == total_) {
      leaf(prob);
      return;
    }
    const auto arm = order[step];
    const auto grabber = owner_[arm];
    const auto own = root_of(grabber);
    const Rational next_prob = prob / Rational(static_cast<unsigned long>(n_ - step - 1));
    for (std::size_t target = 0; target < n_; ++target) {
      if (parent_[target] != kNone || target == own) continue;
      parent_[target] = grabber;
      child_[arm] = target;
      edge_label_[target] = static_cast<std::uint32_t>(step + 1);
      grab(order, step + 1, next_prob, leaf);
      parent_[target] = kNone;
      child_[arm] = kNone;
      edge_label_[target] = 0;
    }
  }

  std::vector<Degree> counts_;
  std::size_t n_;
  std::size_t total_;
  std::vector<std::size_t> slot_offset_;
  std::vector<std::size_t> owner_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> child_;
  std::vector<std::uint32_t> edge_label_;
};

void check_bound(std::size_t n, std::size_t max_n) {
  if (n > max_n) {
    throw TooLarge("n = " + std::to_string(n) + " exceeds the exact bound " +
                   std::to_string(max_n));
  }
}

}  // namespace

ExactLaw exact_terminal_law(const ArmVector& arms, std::size_t max_n) {
  check_bound(arms.n(), max_n);
  Expansion sys(arms);
  const std::size_t n = arms.n();
  ExactLaw law;
  const Rational per_axis = 1 / factorial(n);

  sys.run([&](const Rational& prob) {
    const auto roots = sys.roots();
    const Rational leaf_prob = prob * per_axis;
    // Each initial axis order fixes the left-to-right order of the roots.
    std::vector<std::size_t> axis(n);
    std::iota(axis.begin(), axis.end(), std::size_t{0});
    std::vector<std::size_t> rank(n);
    do {
      for (std::size_t pos = 0; pos < n; ++pos) rank[axis[pos]] = pos;
      auto ordered = roots;
      std::sort(ordered.begin(), ordered.end(),
                [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
      std::vector<Degree> degrees;
      std::vector<std::size_t> starts{0};
      std::vector<std::uint32_t> vl, el;
      for (auto r : ordered) {
        sys.append_tree(r, degrees, &vl, &el);
        starts.push_back(degrees.size());
      }
      LabeledForest f{PlanarForest::from_parts(std::move(degrees), std::move(starts)),
                      std::move(vl), std::move(el)};
      law.outcomes[f.to_string()] += leaf_prob;
    } while (std::next_permutation(axis.begin(), axis.end()));
  });
  return law;
}

ExactLaw exact_terminal_shape_law(const ArmVector& arms, std::size_t max_n) {
  check_bound(arms.n(), max_n);
  Expansion sys(arms);
  const std::size_t k = arms.k();
  ExactLaw law;
  const Rational per_order = 1 / factorial(k);

  sys.run([&](const Rational& prob) {
    const auto roots = sys.roots();
    std::vector<std::vector<Degree>> trees(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
      sys.append_tree(roots[i], trees[i], nullptr, nullptr);
    }
    const Rational leaf_prob = prob * per_order;
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      std::vector<Degree> degrees;
      std::vector<std::size_t> starts{0};
      for (auto i : perm) {
        degrees.insert(degrees.end(), trees[i].begin(), trees[i].end());
        starts.push_back(degrees.size());
      }
      law.outcomes[PlanarForest::from_parts(std::move(degrees), std::move(starts)).to_string()] +=
          leaf_prob;
    } while (std::next_permutation(perm.begin(), perm.end()));
  });
  return law;
}

std::vector<PlanarForest> shapes_with_degrees(const ArmVector& arms) {
  std::vector<Degree> seq(arms.counts().begin(), arms.counts().end());
  std::sort(seq.begin(), seq.end());
  std::vector<PlanarForest> out;
  do {
    if (LukasiewiczWalk(seq).first_passage(arms.k()) == seq.size()) {
      out.push_back(parse_forest(seq, arms.k()));
    }
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

namespace {

// Visits every way of assigning the labels of each degree class to the
// positions of that class.
template <class Visit>
void assign_vertex_labels(const std::vector<std::vector<std::size_t>>& positions,
                          std::vector<std::vector<std::uint32_t>>& labels, std::size_t cls,
                          std::vector<std::uint32_t>& out, Visit&& visit) {
  if (cls == positions.size()) {
    visit(out);
    return;
  }
  auto& ls = labels[cls];
  std::sort(ls.begin(), ls.end());
  do {
    for (std::size_t i = 0; i < ls.size(); ++i) out[positions[cls][i]] = ls[i];
    assign_vertex_labels(positions, labels, cls + 1, out, visit);
  } while (std::next_permutation(ls.begin(), ls.end()));
}

}  // namespace

std::vector<LabeledForest> enumerate_phi(const ArmVector& arms, std::size_t max_n) {
  check_bound(arms.n(), max_n);
  const auto counts = arms.counts();
  const std::size_t n = arms.n();
  const std::size_t edges = arms.total_arms();
  const Degree top = *std::max_element(counts.begin(), counts.end());

  std::vector<LabeledForest> out;
  for (const auto& shape : shapes_with_degrees(arms)) {
    const auto ds = shape.outdegrees();
    std::vector<std::vector<std::size_t>> positions(top + 1);
    std::vector<std::vector<std::uint32_t>> labels(top + 1);
    for (std::size_t i = 0; i < n; ++i) positions[ds[i]].push_back(i);
    for (std::size_t i = 0; i < n; ++i) labels[counts[i]].push_back(static_cast<std::uint32_t>(i + 1));

    std::vector<bool> is_root(n, false);
    for (std::size_t t = 0; t < shape.tree_count(); ++t) is_root[shape.tree_start(t)] = true;
    std::vector<std::size_t> edge_positions;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_root[i]) edge_positions.push_back(i);
    }

    std::vector<std::uint32_t> vertex_labels(n, 0);
    assign_vertex_labels(positions, labels, 0, vertex_labels, [&](const auto& vl) {
      std::vector<std::uint32_t> perm(edges);
      std::iota(perm.begin(), perm.end(), 1U);
      do {
        std::vector<std::uint32_t> el(n, 0);
        for (std::size_t i = 0; i < edges; ++i) el[edge_positions[i]] = perm[i];
        out.push_back(LabeledForest{shape, vl, std::move(el)});
      } while (std::next_permutation(perm.begin(), perm.end()));
    });
  }
  return out;
}

namespace {

void extend_forest(std::size_t n, std::size_t k, const std::vector<Degree>& allowed,
                   std::vector<Degree>& seq, std::int64_t walk,
                   std::vector<PlanarForest>& out) {
  const auto target = -static_cast<std::int64_t>(k);
  const std::size_t i = seq.size();
  if (i == n) {
    if (walk == target) out.push_back(parse_forest(seq, k));
    return;
  }
  for (Degree d : allowed) {
    const auto next = walk + static_cast<std::int64_t>(d) - 1;
    const auto remaining = static_cast<std::int64_t>(n - i - 1);
    // Before the end the walk must stay above -k; it falls at most one per
    // step, so it must also still be able to reach -k exactly at n.
    if (i + 1 < n && next <= target) continue;
    if (next - remaining > target) break;
    seq.push_back(d);
    extend_forest(n, k, allowed, seq, next, out);
    seq.pop_back();
  }
}

}  // namespace

std::vector<PlanarForest> enumerate_forests(std::size_t n, std::size_t k,
                                            const std::vector<Degree>& allowed) {
  std::vector<PlanarForest> out;
  if (k < 1 || k > n) return out;
  std::vector<Degree> seq;
  extend_forest(n, k, allowed, seq, 0, out);
  return out;
}

Rational conditional_gw_mass(const RationalLaw& law, std::size_t k, std::size_t n,
                             std::size_t max_n) {
  check_bound(n, max_n);
  Rational mass = 0;
  for (const auto& f : enumerate_forests(n, k, support_of(law))) {
    mass += forest_probability(law, f);
  }
  return mass;
}

ExactLaw exact_conditional_gw(const RationalLaw& law, std::size_t k, std::size_t n,
                              std::size_t max_n) {
  check_bound(n, max_n);
  const Rational normalizer = first_passage_pmf(law, k, n);
  if (normalizer == 0) {
    throw Infeasible("P(T_" + std::to_string(k) + " = " + std::to_string(n) + ") = 0");
  }
  ExactLaw out;
  for (const auto& f : enumerate_forests(n, k, support_of(law))) {
    out.outcomes[f.to_string()] = forest_probability(law, f) / normalizer;
  }
  if (out.total() != 1) {
    throw std::logic_error("conditioned GW masses do not sum to 1 against first_passage_pmf");
  }
  return out;
}

std::vector<PlanarTree> enumerate_trees(std::size_t max_size) {
  if (max_size > kMaxEnumeratedTreeSize) {
    throw TooLarge("tree enumeration is limited to size " +
                   std::to_string(kMaxEnumeratedTreeSize));
  }
  std::vector<PlanarTree> out;
  for (std::size_t s = 1; s <= max_size; ++s) {
    std::vector<Degree> allowed(s);
    std::iota(allowed.begin(), allowed.end(), Degree{0});
    for (const auto& f : enumerate_forests(s, 1, allowed)) out.push_back(f.tree(0));
  }
  return out;
}

namespace {

template <class Visit>
void arm_vectors_with_sum(std::size_t n, std::size_t remaining, const std::vector<Degree>& support,
                          std::vector<Degree>& x, Visit&& visit) {
  if (x.size() == n) {
    if (remaining == 0) visit(x);
    return;
  }
  const std::size_t slots_after = n - x.size() - 1;
  for (Degree d : support) {
    if (d > remaining) break;
    if (remaining - d > slots_after * support.back()) continue;
    x.push_back(d);
    arm_vectors_with_sum(n, remaining - d, support, x, visit);
    x.pop_back();
  }
}

// Shape marginal of the uniform law on the labeled forests: every shape with the right
// outdegree multiset carries prod_d (m_d)! vertex labelings times (n-k)!
// edge labelings.
ExactLaw uniform_labeled_shape_law(const ArmVector& arms) {
  std::map<Degree, std::size_t> multiplicity;
  for (Degree d : arms.counts()) ++multiplicity[d];
  Rational per_shape = factorial(arms.total_arms());
  for (const auto& [d, m] : multiplicity) per_shape *= factorial(m);

  const auto shapes = shapes_with_degrees(arms);
  const Rational labeled_total = per_shape * Rational(static_cast<unsigned long>(shapes.size()));
  ExactLaw out;
  for (const auto& f : shapes) out.outcomes[f.to_string()] += per_shape / labeled_total;
  return out;
}

}  // namespace

ExactLaw conditioned_terminal_shape_law(const RationalLaw& law, std::size_t k, std::size_t n,
                                        ShapeRoute route) {
  if (k < 1 || k > n) throw Infeasible("need 1 <= k <= n");
  const auto support = support_of(law);
  const Rational normalizer = walk_pmf(law, n, n - k)[n - k];
  if (normalizer == 0) throw Infeasible("P(S_n = n - k) = 0");

  ExactLaw out;
  std::vector<Degree> x;
  arm_vectors_with_sum(n, n - k, support, x, [&](const std::vector<Degree>& arms_x) {
    Rational weight = 1;
    for (Degree d : arms_x) weight *= law.prob(d);
    weight /= normalizer;
    ArmVector arms(arms_x);
    const ExactLaw shapes = route == ShapeRoute::uniform_labeled ? uniform_labeled_shape_law(arms)
                                                             : exact_terminal_shape_law(arms);
    for (const auto& [key, p] : shapes.outcomes) out.outcomes[key] += weight * p;
  });
  return out;
}

}  // namespace grabforest
