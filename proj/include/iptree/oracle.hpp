#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/event_tree.hpp"
#include "iptree/gamble.hpp"
#include "iptree/inference.hpp"
#include "iptree/numeric.hpp"

namespace iptree {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t(1) << 22;

// A probability tree: one mass function over the children of every
// non-terminal situation. Non-owning view onto the event tree.
template <class T>
struct PreciseTree {
  const EventTree* tree = nullptr;
  std::vector<std::vector<T>> masses;  // indexed by node; empty at terminals
};

// Backward expectation sweep: E(leaf) = f(leaf), E(s) = sum of mass-weighted
// child expectations. Returns E(t).
template <class T>
T precise_expectation(const PreciseTree<T>& pt, const Gamble<T>& f, EventTree::Node t) {
  const EventTree& tree = *pt.tree;
  std::vector<T> val = values_by_node(tree, f, t);
  for (EventTree::Node s = t + tree.subtree_size(t) - 1; s >= t; --s) {
    if (tree.is_terminal(s)) continue;
    const auto& kids = tree.children(s);
    const auto& mass = pt.masses[s];
    if (mass.size() != kids.size())
      fail(Err::CarrierMismatch, "mass at '" + tree.label(s) + "' does not match its children");
    T e(0);
    for (std::size_t i = 0; i < kids.size(); ++i) e += mass[i] * val[kids[i]];
    val[s] = e;
  }
  return val[t];
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

// Number of vertex assignments a credal enumeration over the subtree of t
// would visit; saturates at UINT64_MAX.
template <class T>
std::uint64_t enumeration_count(const ImpreciseProbabilityTree<T>& ipt, EventTree::Node t) {
  const EventTree& tree = ipt.tree();
  std::uint64_t count = 1;
  for (EventTree::Node s = t; s < t + tree.subtree_size(t); ++s) {
    if (tree.is_terminal(s)) continue;
    std::uint64_t v = ipt.local(s).kind() == ModelKind::Credal
                          ? ipt.local(s).extreme_points().size()
                          : ipt.local(s).as_credal().extreme_points().size();
    count = saturating_mul(count, v);
  }
  return count;
}

template <class T>
struct EnumerationResult {
  T lower{0};
  // Vertex index per non-terminal situation of the subtree, preorder. This
  // is the lexicographically first assignment attaining the minimum.
  std::vector<std::pair<EventTree::Node, int>> argmin;
  std::uint64_t assignments = 0;
};

namespace detail {

template <class T>
struct EnumerationSpace {
  std::vector<EventTree::Node> nodes;                // non-terminals, preorder
  std::vector<std::vector<std::vector<T>>> vertices; // aligned with nodes
  std::uint64_t count = 1;
};

template <class T>
EnumerationSpace<T> enumeration_space(const ImpreciseProbabilityTree<T>& ipt,
                                      EventTree::Node t, std::uint64_t cap,
                                      const char* what) {
  const EventTree& tree = ipt.tree();
  EnumerationSpace<T> space;
  for (EventTree::Node s = t; s < t + tree.subtree_size(t); ++s) {
    if (tree.is_terminal(s)) continue;
    space.nodes.push_back(s);
    space.vertices.push_back(ipt.local(s).as_credal().extreme_points());
    space.count = saturating_mul(space.count, space.vertices.back().size());
  }
  if (space.count > cap)
    throw Error(Err::EnumerationCapExceeded,
                std::string(what) + " needs " + std::to_string(space.count) +
                    " vertex assignments, cap is " + std::to_string(cap),
                space.count);
  return space;
}

// Advances a mixed-radix odometer (last digit fastest, so tuples are visited
// in ascending lexicographic order). Returns false after the last tuple.
inline bool advance(std::vector<int>& digits, const std::vector<int>& radix) {
  for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
    if (++digits[i] < radix[i]) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace detail

// The credal-set baseline: assign one extreme point to every non-terminal
// situation of the subtree, compute the expectation of the induced precise
// tree, and take the minimum over all assignments. Exponential by design;
// refuses to run past `cap`.
template <class T>
EnumerationResult<T> credal_enumeration_lower(const ImpreciseProbabilityTree<T>& ipt,
                                              const Gamble<T>& f, EventTree::Node t,
                                              std::uint64_t cap = kDefaultEnumerationCap) {
  const EventTree& tree = ipt.tree();
  auto space = detail::enumeration_space(ipt, t, cap, "credal enumeration");
  const auto f_by_node = values_by_node(tree, f, t);

  std::vector<int> digits(space.nodes.size(), 0);
  std::vector<int> radix;
  radix.reserve(space.vertices.size());
  for (const auto& v : space.vertices) radix.push_back(static_cast<int>(v.size()));
  std::vector<int> slot(tree.node_count(), -1);
  for (std::size_t i = 0; i < space.nodes.size(); ++i) slot[space.nodes[i]] = static_cast<int>(i);

  EnumerationResult<T> result;
  result.assignments = space.count;
  bool first = true;
  std::vector<T> val(f_by_node.size());
  do {
    val = f_by_node;
    for (EventTree::Node s = t + tree.subtree_size(t) - 1; s >= t; --s) {
      if (tree.is_terminal(s)) continue;
      const auto& kids = tree.children(s);
      const auto& vertex = space.vertices[slot[s]][digits[slot[s]]];
      T e(0);
      for (std::size_t i = 0; i < kids.size(); ++i) e += vertex[i] * val[kids[i]];
      val[s] = e;
    }
    if (first || val[t] < result.lower) {
      first = false;
      result.lower = val[t];
      result.argmin.clear();
      for (std::size_t i = 0; i < space.nodes.size(); ++i)
        result.argmin.emplace_back(space.nodes[i], digits[i]);
    }
  } while (detail::advance(digits, radix));
  return result;
}

// Minima at every situation of the tree from one enumeration over the full
// assignment space: the expectation at t only depends on the assignment
// restricted to the subtree of t, so the per-situation minima agree with
// subtree-local enumerations.
template <class T>
std::vector<T> credal_enumeration_lower_all(const ImpreciseProbabilityTree<T>& ipt,
                                            const Gamble<T>& f,
                                            std::uint64_t cap = kDefaultEnumerationCap) {
  const EventTree& tree = ipt.tree();
  EventTree::Node root = tree.root();
  auto space = detail::enumeration_space(ipt, root, cap, "credal enumeration");
  const auto f_by_node = values_by_node(tree, f, root);

  std::vector<int> digits(space.nodes.size(), 0);
  std::vector<int> radix;
  for (const auto& v : space.vertices) radix.push_back(static_cast<int>(v.size()));
  std::vector<int> slot(tree.node_count(), -1);
  for (std::size_t i = 0; i < space.nodes.size(); ++i) slot[space.nodes[i]] = static_cast<int>(i);

  std::vector<T> best;
  std::vector<T> val(f_by_node.size());
  bool first = true;
  do {
    val = f_by_node;
    for (EventTree::Node s = tree.node_count() - 1; s >= 0; --s) {
      if (tree.is_terminal(s)) continue;
      const auto& kids = tree.children(s);
      const auto& vertex = space.vertices[slot[s]][digits[slot[s]]];
      T e(0);
      for (std::size_t i = 0; i < kids.size(); ++i) e += vertex[i] * val[kids[i]];
      val[s] = e;
    }
    if (first) {
      best = val;
      first = false;
    } else {
      for (std::size_t i = 0; i < best.size(); ++i)
        if (val[i] < best[i]) best[i] = val[i];
    }
  } while (detail::advance(digits, radix));
  return best;
}

// The accumulated payoff of a selection: zero at the base, each step adds
// the chosen gamble's value at the move Reality makes. Validates that every
// choice is locally desirable.
template <class T>
std::pair<TreeProcess<T>, Gamble<T>> gamble_process(const ImpreciseProbabilityTree<T>& ipt,
                                                    const Selection<T>& sel,
                                                    EventTree::Node t) {
  const EventTree& tree = ipt.tree();
  if (sel.base != t)
    fail(Err::InvalidSelection, "selection is based at '" + tree.label(sel.base) +
                                    "', not at '" + tree.label(t) + "'");
  const T tol = num<T>::desirability_tol();
  TreeProcess<T> process{&tree, t, std::vector<T>(tree.node_count(), T(0))};
  for (EventTree::Node s = t; s < t + tree.subtree_size(t); ++s) {
    if (tree.is_terminal(s)) continue;
    auto it = sel.choices.find(s);
    if (it == sel.choices.end())
      fail(Err::InvalidSelection, "selection chooses nothing at '" + tree.label(s) + "'");
    const auto& choice = it->second;
    const auto& kids = tree.children(s);
    if (choice.size() != kids.size())
      fail(Err::InvalidSelection, "choice at '" + tree.label(s) + "' does not match its moves");
    if (ipt.local(s).lower(choice) < -tol)
      fail(Err::InvalidSelection,
           "choice at '" + tree.label(s) + "' is not locally desirable");
    for (std::size_t i = 0; i < kids.size(); ++i)
      process.values[kids[i]] = process.values[s] + choice[i];
  }
  Gamble<T> terminal = restrict_to_terminals(process, t);
  return {std::move(process), std::move(terminal)};
}

// The largest alpha with f - alpha >= terminal gamble process, i.e. the
// lower bound on P(f | base) this selection certifies.
template <class T>
T selection_certified_bound(const ImpreciseProbabilityTree<T>& ipt, const Selection<T>& sel,
                            const Gamble<T>& f) {
  auto [process, terminal] = gamble_process(ipt, sel, sel.base);
  const EventTree& tree = ipt.tree();
  auto terms = tree.terminals_through(sel.base);
  T bound = f.at(tree.label(terms[0])) - terminal[0];
  for (std::size_t i = 1; i < terms.size(); ++i) {
    T v = f.at(tree.label(terms[i])) - terminal[i];
    if (v < bound) bound = v;
  }
  return bound;
}

// The U-called-off selection: mimics sel strictly before the cut, then
// selects zero gambles.
template <class T>
Selection<T> call_off_selection(const EventTree& tree, const Selection<T>& sel, const Cut& cut) {
  Cut checked = validate_cut(tree, sel.base, cut.members);
  Selection<T> off{sel.base, {}};
  for (const auto& [s, choice] : sel.choices) {
    if (strictly_before_cut(tree, checked, s))
      off.choices[s] = choice;
    else
      off.choices[s] = std::vector<T>(choice.size(), T(0));
  }
  return off;
}

// Restriction of a selection to the subtree of u (zero outside is implied
// by the smaller base).
template <class T>
Selection<T> restrict_selection(const EventTree& tree, const Selection<T>& sel,
                                EventTree::Node u) {
  Selection<T> out{u, {}};
  for (const auto& [s, choice] : sel.choices)
    if (tree.precedes(u, s)) out.choices[s] = choice;
  return out;
}

}  // namespace iptree
