#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "iptree/desirability.hpp"
#include "iptree/event_tree.hpp"
#include "iptree/gamble.hpp"
#include "iptree/inference.hpp"
#include "iptree/laws.hpp"
#include "iptree/markov.hpp"
#include "iptree/oracle.hpp"

namespace iptree {

// ---------------------------------------------------------------------------
// Named fixtures
// ---------------------------------------------------------------------------

// Two successive coin flips: root "?,?" with the first flip's outcome filled
// in on the way down ("h,?", then "h,h" / "h,t", ...).
inline EventTree two_coin_tree() {
  EventTree::Spec spec;
  spec.root = "?,?";
  spec.edges = {
      {"?,?", {"h,?", "t,?"}},
      {"h,?", {"h,h", "h,t"}},
      {"t,?", {"t,h", "t,t"}},
  };
  return EventTree::build(spec);
}

// Flip coins until one lands tails or n coins are spent: a chain of
// non-terminals h0 (the root) .. h(n-1), terminals t1..tn and hn, children
// ordered [tails, heads].
inline EventTree coins_tree(int n) {
  EventTree::Spec spec;
  spec.root = "h0";
  for (int k = 0; k < n; ++k)
    spec.edges.emplace_back(
        "h" + std::to_string(k),
        std::vector<std::string>{"t" + std::to_string(k + 1), "h" + std::to_string(k + 1)});
  return EventTree::build(spec);
}

// The coins tree with every flip judged approximately fair: heads
// probability within `deviation` of 1/2 at every non-terminal.
template <class T>
ImpreciseProbabilityTree<T> coins_ipt(int n, const T& deviation) {
  EventTree tree = coins_tree(n);
  std::vector<std::optional<LocalModel<T>>> locals(tree.node_count());
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) {
    if (tree.is_terminal(s)) continue;
    locals[s] = LocalModel<T>::near_fair_coin(make_carrier(tree.child_labels(s)), deviation);
  }
  return ImpreciseProbabilityTree<T>(std::move(tree), std::move(locals));
}

// Ball colours in the urn example: willing to bet on each colour at rates up
// to 1/4.
template <class T>
Assessment<T> urn_assessment() {
  CarrierPtr space = make_carrier({"r", "g", "b"});
  T quarter = num<T>::from_ratio(1, 4);
  std::vector<Gamble<T>> gambles;
  for (const char* colour : {"r", "g", "b"})
    gambles.push_back(Gamble<T>::indicator(space, {colour}) - quarter);
  return Assessment<T>(std::move(space), std::move(gambles));
}

// The urn as a one-step tree: the root's credal set is the hull of the
// natural extension of the urn assessment.
template <class T>
ImpreciseProbabilityTree<T> urn_one_step_ipt() {
  EventTree::Spec spec;
  spec.root = "draw";
  spec.edges = {{"draw", {"r", "g", "b"}}};
  EventTree tree = EventTree::build(spec);
  CarrierPtr moves = make_carrier(tree.child_labels(0));
  T h = num<T>::from_ratio(1, 2), q = num<T>::from_ratio(1, 4);
  auto model = LocalModel<T>::credal(moves, {{h, q, q}, {q, h, q}, {q, q, h}});
  std::vector<std::optional<LocalModel<T>>> locals(tree.node_count());
  locals[0] = model;
  return ImpreciseProbabilityTree<T>(std::move(tree), std::move(locals));
}

// ---------------------------------------------------------------------------
// Seeded random instances. All values live on the grid Z/64, so sums of
// moderately many of them are exact in double precision; equality assertions
// on gamble processes can then be literal.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

inline double dyadic(Rng& rng, int lo = -64, int hi = 64) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(rng) / 64.0;
}

inline double dyadic_floor(double v) { return std::floor(v * 64.0) / 64.0; }

struct TreeGenOptions {
  int max_depth = 4;
  int max_branching = 3;
  double stop_probability = 0.35;  // chance a non-root node becomes terminal
};

inline EventTree random_tree(Rng& rng, const TreeGenOptions& options = {}) {
  EventTree::Spec spec;
  spec.root = "s0";
  int next = 1;
  std::uniform_int_distribution<int> branch(2, options.max_branching);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  // (label, depth) queue of nodes that still need children.
  std::vector<std::pair<std::string, int>> open{{"s0", 0}};
  while (!open.empty()) {
    auto [label, depth] = open.back();
    open.pop_back();
    int kids = branch(rng);
    std::vector<std::string> children;
    for (int i = 0; i < kids; ++i) {
      std::string child = "s" + std::to_string(next++);
      bool terminal = depth + 1 >= options.max_depth ||
                      (depth >= 1 && coin(rng) < options.stop_probability);
      if (!terminal) open.emplace_back(child, depth + 1);
      children.push_back(std::move(child));
    }
    spec.edges.emplace_back(label, std::move(children));
  }
  return EventTree::build(spec);
}

// Draws masses with small rational entries (k / total on a grid).
inline std::vector<double> random_mass(Rng& rng, std::size_t arity) {
  std::uniform_int_distribution<int> d(1, 8);
  std::vector<int> weights(arity);
  int total = 0;
  for (auto& w : weights) {
    w = d(rng);
    total += w;
  }
  std::vector<double> mass(arity);
  for (std::size_t i = 0; i < arity; ++i) mass[i] = static_cast<double>(weights[i]) / total;
  return mass;
}

inline LocalModel<double> random_local_model(Rng& rng, CarrierPtr carrier,
                                             int max_vertices = 3) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::size_t arity = carrier->size();
  switch (kind(rng)) {
    case 0:
      return LocalModel<double>::vacuous(std::move(carrier));
    case 1:
      return LocalModel<double>::precise(std::move(carrier), random_mass(rng, arity));
    case 2: {
      std::uniform_real_distribution<double> d(0.0, 1.0);
      return LocalModel<double>::linear_vacuous(std::move(carrier), random_mass(rng, arity),
                                                std::floor(d(rng) * 16) / 16.0);
    }
    default: {
      std::uniform_int_distribution<int> nv(1, max_vertices);
      int k = nv(rng);
      std::vector<std::vector<double>> pts;
      for (int i = 0; i < k; ++i) pts.push_back(random_mass(rng, arity));
      return LocalModel<double>::credal(std::move(carrier), std::move(pts));
    }
  }
}

// A random imprecise probability tree whose full-tree credal enumeration
// stays within `vertex_budget` assignments (imprecise nodes are demoted to
// precise ones until it does).
inline ImpreciseProbabilityTree<double> random_ipt(Rng& rng, const TreeGenOptions& options = {},
                                                   int max_vertices = 3,
                                                   std::uint64_t vertex_budget = 1 << 12) {
  EventTree tree = random_tree(rng, options);
  std::vector<std::optional<LocalModel<double>>> locals(tree.node_count());
  std::vector<EventTree::Node> imprecise;
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) {
    if (tree.is_terminal(s)) continue;
    auto model = random_local_model(rng, make_carrier(tree.child_labels(s)), max_vertices);
    if (model.kind() != ModelKind::Precise) imprecise.push_back(s);
    locals[s] = std::move(model);
  }
  auto count = [&] {
    std::uint64_t c = 1;
    for (const auto& m : locals)
      if (m) c = saturating_mul(c, m->as_credal().extreme_points().size());
    return c;
  };
  std::shuffle(imprecise.begin(), imprecise.end(), rng);
  for (auto s : imprecise) {
    if (count() <= vertex_budget) break;
    locals[s] = LocalModel<double>::precise(locals[s]->carrier(),
                                            random_mass(rng, locals[s]->arity()));
  }
  return ImpreciseProbabilityTree<double>(std::move(tree), std::move(locals));
}

// A gamble on the paths through the root, dyadic values in [-1, 1].
inline Gamble<double> random_terminal_gamble(Rng& rng, const EventTree& tree) {
  auto carrier = terminal_carrier(tree, tree.root());
  std::vector<double> v(carrier->size());
  for (auto& x : v) x = dyadic(rng);
  return Gamble<double>(carrier, std::move(v));
}

// A valid selection from t: per situation a dyadic gamble shifted down to a
// dyadic value at or below its local lower prevision, so local desirability
// holds with margin and process sums stay exactly representable.
inline Selection<double> random_valid_selection(Rng& rng,
                                                const ImpreciseProbabilityTree<double>& ipt,
                                                EventTree::Node t) {
  const EventTree& tree = ipt.tree();
  Selection<double> sel{t, {}};
  for (EventTree::Node s = t; s < t + tree.subtree_size(t); ++s) {
    if (tree.is_terminal(s)) continue;
    std::vector<double> g(tree.children(s).size());
    for (auto& x : g) x = dyadic(rng);
    double shift = dyadic_floor(ipt.local(s).lower(g));
    for (auto& x : g) x -= shift;
    sel.choices[s] = std::move(g);
  }
  return sel;
}

// A random cut of t: each situation either joins the cut or defers to its
// children; terminals always join.
inline Cut random_cut(Rng& rng, const EventTree& tree, EventTree::Node t,
                      double stop_probability = 0.4) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<EventTree::Node> members;
  std::vector<EventTree::Node> stack{t};
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    if (tree.is_terminal(s) || (s != t && coin(rng) < stop_probability)) {
      members.push_back(s);
    } else {
      for (auto c : tree.children(s)) stack.push_back(c);
    }
  }
  return validate_cut(tree, t, std::move(members));
}

// Every cut of t (the trivial cut {t} first). Sizes are exponential in the
// tree depth, so callers cap via `limit`.
inline std::vector<std::vector<EventTree::Node>> all_cut_member_sets(const EventTree& tree,
                                                                     EventTree::Node t,
                                                                     std::size_t limit = 5000) {
  std::vector<std::vector<EventTree::Node>> result{{t}};
  if (tree.is_terminal(t)) return result;
  std::vector<std::vector<std::vector<EventTree::Node>>> per_child;
  for (auto c : tree.children(t)) per_child.push_back(all_cut_member_sets(tree, c, limit));
  std::vector<std::vector<EventTree::Node>> combined{{}};
  for (const auto& options : per_child) {
    std::vector<std::vector<EventTree::Node>> next;
    for (const auto& partial : combined)
      for (const auto& option : options) {
        if (next.size() + result.size() > limit) break;
        auto merged = partial;
        merged.insert(merged.end(), option.begin(), option.end());
        next.push_back(std::move(merged));
      }
    combined = std::move(next);
  }
  for (auto& members : combined) result.push_back(std::move(members));
  return result;
}

// A random commitment plan on ipt from `base` to a random non-trivial
// horizon. Prices sit at a dyadic value at or below the local lower
// prevision of dyadic commitment gambles, clamped to the gamble's range.
inline CommitmentPlan random_plan(Rng& rng, const ImpreciseProbabilityTree<double>& ipt,
                                  EventTree::Node base) {
  const EventTree& tree = ipt.tree();
  Cut horizon = random_cut(rng, tree, base);
  while (horizon.members.size() == 1 && horizon.members[0] == base)
    horizon = random_cut(rng, tree, base);
  std::map<EventTree::Node, Commitment> commitments;
  bool some_oscillation = false;
  for (EventTree::Node s = base; s < base + tree.subtree_size(base); ++s) {
    if (!strictly_before_cut(tree, horizon, s)) continue;
    Commitment c;
    c.h.resize(tree.children(s).size());
    for (auto& v : c.h) v = dyadic(rng, 0, 64);
    double lo = *std::min_element(c.h.begin(), c.h.end());
    double hi = *std::max_element(c.h.begin(), c.h.end());
    c.m = std::max(lo, dyadic_floor(ipt.local(s).lower(c.h)));
    if (hi > lo) some_oscillation = true;
    commitments.emplace(s, std::move(c));
  }
  if (!some_oscillation) {
    // Force one genuine commitment so a bound B exists.
    auto& c = commitments.begin()->second;
    c.h[0] += 0.5;
    c.m = std::max(*std::min_element(c.h.begin(), c.h.end()),
                   dyadic_floor(ipt.local(commitments.begin()->first).lower(c.h)));
  }
  return make_plan(ipt, base, std::move(horizon), std::move(commitments));
}

// A random chain over 2..max_states states whose unrolled enumeration at
// horizon `n` stays within `vertex_budget` (imprecise transition models are
// demoted to precise ones until it does).
inline ImpreciseMarkovChain<double> random_chain(Rng& rng, int max_states, int max_vertices,
                                                 int horizon,
                                                 std::uint64_t vertex_budget = 1 << 14) {
  std::uniform_int_distribution<int> ns(2, max_states);
  int n_states = ns(rng);
  std::vector<std::string> labels;
  for (int i = 0; i < n_states; ++i) labels.push_back(std::string(1, char('a' + i)));
  CarrierPtr states = make_carrier(labels);

  auto initial = random_local_model(rng, states, max_vertices);
  std::vector<LocalModel<double>> per_state;
  for (int i = 0; i < n_states; ++i) per_state.push_back(random_local_model(rng, states, max_vertices));

  auto assignments = [&]() {
    std::uint64_t count = initial.as_credal().extreme_points().size();
    std::uint64_t seq_per_state = 1;
    for (int k = 1; k < horizon; ++k) {
      for (const auto& m : per_state) {
        std::uint64_t v = m.as_credal().extreme_points().size();
        if (v == 1) continue;
        for (std::uint64_t i = 0; i < seq_per_state; ++i) {
          count = saturating_mul(count, v);
          if (count > vertex_budget) return count;
        }
      }
      seq_per_state = saturating_mul(seq_per_state, static_cast<std::uint64_t>(n_states));
    }
    return count;
  };
  std::uniform_int_distribution<int> pick(0, n_states - 1);
  while (assignments() > vertex_budget) {
    int x = pick(rng);
    if (per_state[x].kind() == ModelKind::Precise) continue;
    per_state[x] = LocalModel<double>::precise(states, random_mass(rng, states->size()));
  }
  return ImpreciseMarkovChain<double>(states, std::move(initial), std::move(per_state));
}

}  // namespace iptree
