#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/event_tree.hpp"
#include "iptree/gamble.hpp"
#include "iptree/local_model.hpp"
#include "iptree/numeric.hpp"

namespace iptree {

// An event tree carrying a local imprecise belief model at every
// non-terminal situation. Immutable once built.
template <class T>
class ImpreciseProbabilityTree {
 public:
  using Node = EventTree::Node;

  ImpreciseProbabilityTree(EventTree tree, std::vector<std::optional<LocalModel<T>>> locals)
      : tree_(std::move(tree)), locals_(std::move(locals)) {
    if (locals_.size() != static_cast<std::size_t>(tree_.node_count()))
      fail(Err::CarrierMismatch, "one local model slot per situation expected");
    for (Node s = 0; s < tree_.node_count(); ++s) {
      if (tree_.is_terminal(s)) continue;
      if (!locals_[s])
        fail(Err::CarrierMismatch,
             "non-terminal situation '" + tree_.label(s) + "' lacks a local model");
      if (locals_[s]->carrier()->labels() != tree_.child_labels(s))
        fail(Err::CarrierMismatch, "local model at '" + tree_.label(s) +
                                       "' does not live on that situation's move space");
    }
  }

  ImpreciseProbabilityTree(EventTree tree, const std::map<std::string, LocalModel<T>>& by_label)
      : ImpreciseProbabilityTree(std::move(tree), index_models(tree, by_label)) {}

  const EventTree& tree() const { return tree_; }
  const LocalModel<T>& local(Node s) const {
    if (tree_.is_terminal(s))
      fail(Err::TerminalSituation, "terminal situation '" + tree_.label(s) + "' has no local model");
    return *locals_[s];
  }

 private:
  static std::vector<std::optional<LocalModel<T>>> index_models(
      const EventTree& tree, const std::map<std::string, LocalModel<T>>& by_label) {
    std::vector<std::optional<LocalModel<T>>> locals(tree.node_count());
    for (const auto& [label, model] : by_label) locals[tree.index_of(label)] = model;
    return locals;
  }

  EventTree tree_;
  std::vector<std::optional<LocalModel<T>>> locals_;
};

// A per-situation choice of locally desirable gamble, the witness side of a
// lower prevision. choices[s] is aligned with children(s).
template <class T>
struct Selection {
  EventTree::Node base = 0;
  std::map<EventTree::Node, std::vector<T>> choices;
};

template <class T>
Selection<T> zero_selection(const EventTree& tree, EventTree::Node base) {
  Selection<T> sel{base, {}};
  for (EventTree::Node s = base; s < base + tree.subtree_size(base); ++s)
    if (!tree.is_terminal(s)) sel.choices[s] = std::vector<T>(tree.children(s).size(), T(0));
  return sel;
}

// One bottom-up pass of the backwards recursion over the subtree of t:
// terminal values are f, each non-terminal takes its local lower prevision
// of the children's values. Children are combined in stored order, so the
// result is reproducible regardless of call context.
template <class T>
std::vector<T> lower_value_sweep(const ImpreciseProbabilityTree<T>& ipt,
                                 std::vector<T> f_by_node, EventTree::Node t) {
  const EventTree& tree = ipt.tree();
  std::vector<T>& val = f_by_node;
  std::vector<T> child_values;
  for (EventTree::Node s = t + tree.subtree_size(t) - 1; s >= t; --s) {
    if (tree.is_terminal(s)) continue;
    const auto& kids = tree.children(s);
    child_values.resize(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) child_values[i] = val[kids[i]];
    val[s] = ipt.local(s).lower(child_values);
  }
  return val;
}

// The predictive lower prevision of f contingent on reaching t. f must be
// defined on every path through t; values elsewhere are irrelevant.
template <class T>
T predictive_lower(const ImpreciseProbabilityTree<T>& ipt, const Gamble<T>& f,
                   EventTree::Node t) {
  auto val = lower_value_sweep(ipt, values_by_node(ipt.tree(), f, t), t);
  return val[t];
}

template <class T>
T predictive_lower(const ImpreciseProbabilityTree<T>& ipt, const Gamble<T>& f,
                   const std::string& situation) {
  return predictive_lower(ipt, f, ipt.tree().index_of(situation));
}

template <class T>
T predictive_upper(const ImpreciseProbabilityTree<T>& ipt, const Gamble<T>& f,
                   EventTree::Node t) {
  return -predictive_lower(ipt, -f, t);
}

template <class T>
T predictive_upper(const ImpreciseProbabilityTree<T>& ipt, const Gamble<T>& f,
                   const std::string& situation) {
  return predictive_upper(ipt, f, ipt.tree().index_of(situation));
}

// Predictive lower previsions at every situation of the tree in one sweep.
template <class T>
std::vector<T> predictive_lower_all(const ImpreciseProbabilityTree<T>& ipt,
                                    const Gamble<T>& f) {
  return lower_value_sweep(ipt, values_by_node(ipt.tree(), f, ipt.tree().root()),
                           ipt.tree().root());
}

// The U-measurable gamble u -> P(f | u) as a gamble on the cut.
template <class T>
Gamble<T> predictive_lower_on_cut(const ImpreciseProbabilityTree<T>& ipt, const Gamble<T>& f,
                                  const Cut& cut) {
  const EventTree& tree = ipt.tree();
  auto val = lower_value_sweep(ipt, values_by_node(tree, f, cut.base), cut.base);
  std::vector<T> v;
  v.reserve(cut.members.size());
  for (auto m : cut.members) v.push_back(val[m]);
  return Gamble<T>(cut_carrier(tree, cut), std::move(v));
}

// Membership of f in the natural extension of the whole tree model, under
// the closed-local-cone convention.
template <class T>
bool natural_extension_member(const ImpreciseProbabilityTree<T>& ipt, const Gamble<T>& f) {
  return predictive_lower(ipt, f, ipt.tree().root()) >= T(0);
}

// The witness selection behind the recursion: at each situation the value
// gamble of its children, recentred to local price zero. Its gamble process
// telescopes to f - P(f | t) on every path through t, so the guarantee
//     f - P(f | t) + epsilon >= gamble process at the terminals
// holds pointwise; epsilon = 0 is valid because the local minima here are
// attained.
template <class T>
Selection<T> optimal_selection(const ImpreciseProbabilityTree<T>& ipt, const Gamble<T>& f,
                               EventTree::Node t, const T& epsilon) {
  if (epsilon < T(0)) fail(Err::EpsilonNegative, "epsilon must be non-negative");
  const EventTree& tree = ipt.tree();
  auto val = lower_value_sweep(ipt, values_by_node(tree, f, t), t);
  Selection<T> sel{t, {}};
  for (EventTree::Node s = t; s < t + tree.subtree_size(t); ++s) {
    if (tree.is_terminal(s)) continue;
    const auto& kids = tree.children(s);
    std::vector<T> choice(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) choice[i] = val[kids[i]] - val[s];
    sel.choices[s] = std::move(choice);
  }
  return sel;
}

}  // namespace iptree
