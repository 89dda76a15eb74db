#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/gamble.hpp"
#include "iptree/inference.hpp"
#include "iptree/local_model.hpp"
#include "iptree/oracle.hpp"

namespace iptree {

inline constexpr std::uint64_t kDefaultUnrollNodeCap = std::uint64_t(1) << 22;

// A time-homogeneous imprecise Markov chain: a local model for the state at
// time 1 and, per state, a local model for the next state.
template <class T>
class ImpreciseMarkovChain {
 public:
  ImpreciseMarkovChain(CarrierPtr states, LocalModel<T> initial,
                       std::vector<LocalModel<T>> per_state)
      : states_(std::move(states)),
        initial_(std::move(initial)),
        per_state_(std::move(per_state)) {
    if (states_->size() < 2)
      fail(Err::CarrierMismatch, "a chain needs at least two states");
    if (!same_carrier(initial_.carrier(), states_))
      fail(Err::CarrierMismatch, "initial model does not live on the state space");
    if (per_state_.size() != states_->size())
      fail(Err::CarrierMismatch, "one transition model per state expected");
    for (const auto& m : per_state_)
      if (!same_carrier(m.carrier(), states_))
        fail(Err::CarrierMismatch, "transition model does not live on the state space");
  }

  const CarrierPtr& states() const { return states_; }
  const LocalModel<T>& initial() const { return initial_; }
  const LocalModel<T>& transition_from(std::size_t state) const { return per_state_[state]; }
  std::size_t state_count() const { return states_->size(); }

 private:
  CarrierPtr states_;
  LocalModel<T> initial_;
  std::vector<LocalModel<T>> per_state_;
};

// The transition operator: T(f)(x) is the lower prevision of f given the
// system sits in x.
template <class T>
Gamble<T> apply_transition(const ImpreciseMarkovChain<T>& chain, const Gamble<T>& f) {
  if (!same_carrier(f.carrier(), chain.states()))
    fail(Err::CarrierMismatch, "gamble does not live on the state space");
  std::vector<T> v(chain.state_count());
  for (std::size_t x = 0; x < chain.state_count(); ++x)
    v[x] = chain.transition_from(x).lower(std::span<const T>(f.values()));
  return Gamble<T>(chain.states(), std::move(v));
}

// The conjugate operator for upper previsions.
template <class T>
Gamble<T> apply_transition_upper(const ImpreciseMarkovChain<T>& chain, const Gamble<T>& f) {
  return -apply_transition(chain, -f);
}

// The lower prevision of a gamble that depends on the state at time n alone,
// by n-1 operator applications and one initial-model evaluation. Linear in
// n. Gambles on whole paths are not accepted here; unroll to a tree for
// those.
template <class T>
T state_lower_prevision(const ImpreciseMarkovChain<T>& chain, const Gamble<T>& f, int n) {
  if (n < 1) fail(Err::NonPositiveHorizon, "the time index must be at least 1");
  if (!same_carrier(f.carrier(), chain.states()))
    fail(Err::CarrierMismatch, "gamble does not live on the state space");
  Gamble<T> g = f;
  for (int k = 1; k < n; ++k) g = apply_transition(chain, g);
  return chain.initial().lower(std::span<const T>(g.values()));
}

template <class T>
T state_upper_prevision(const ImpreciseMarkovChain<T>& chain, const Gamble<T>& f, int n) {
  return -state_lower_prevision(chain, -f, n);
}

// Rebinds a model to a carrier of equal arity (the unrolled tree's move
// spaces carry sequence labels, not bare state labels).
template <class T>
LocalModel<T> remap_carrier(const LocalModel<T>& model, CarrierPtr carrier) {
  if (model.arity() != carrier->size())
    fail(Err::CarrierMismatch, "carrier arity mismatch");
  switch (model.kind()) {
    case ModelKind::Vacuous:
      return LocalModel<T>::vacuous(std::move(carrier));
    case ModelKind::Precise:
      return LocalModel<T>::precise(std::move(carrier), model.mass());
    case ModelKind::LinearVacuous:
      return LocalModel<T>::linear_vacuous(std::move(carrier), model.mass(), model.delta());
    case ModelKind::Credal:
      return LocalModel<T>::credal(std::move(carrier), model.extreme_points());
  }
  fail(Err::CarrierMismatch, "unreachable");
}

// The chain unrolled over N steps: situations are state sequences
// ("a", "a,b", ...; the root's label is empty), the model at a situation is
// the transition model of its last state, and time_cuts[k-1] reveals the
// state at time k.
template <class T>
struct UnrolledChain {
  ImpreciseProbabilityTree<T> ipt;
  std::vector<Cut> time_cuts;  // X^1 .. X^N
};

template <class T>
UnrolledChain<T> unroll_to_tree(const ImpreciseMarkovChain<T>& chain, int horizon,
                                std::uint64_t node_cap = kDefaultUnrollNodeCap) {
  if (horizon < 1) fail(Err::NonPositiveHorizon, "the horizon must be at least 1");
  const std::size_t states = chain.state_count();
  std::uint64_t nodes = 1, level = 1;
  for (int k = 1; k <= horizon; ++k) {
    level = saturating_mul(level, states);
    nodes = nodes > std::numeric_limits<std::uint64_t>::max() - level
                ? std::numeric_limits<std::uint64_t>::max()
                : nodes + level;
  }
  if (nodes > node_cap)
    throw Error(Err::SizeCapExceeded,
                "unrolling needs " + std::to_string(nodes) + " situations, cap is " +
                    std::to_string(node_cap),
                nodes);

  EventTree::Spec spec;
  spec.root = "";
  std::vector<std::string> frontier{""};
  for (int k = 0; k < horizon; ++k) {
    std::vector<std::string> next;
    next.reserve(frontier.size() * states);
    for (const auto& prefix : frontier) {
      std::vector<std::string> kids;
      kids.reserve(states);
      for (std::size_t x = 0; x < states; ++x) {
        std::string label =
            prefix.empty() ? chain.states()->label(x) : prefix + "," + chain.states()->label(x);
        kids.push_back(label);
        next.push_back(std::move(label));
      }
      spec.edges.emplace_back(prefix, std::move(kids));
    }
    frontier = std::move(next);
  }

  EventTree tree = EventTree::build(spec);
  std::vector<std::optional<LocalModel<T>>> locals(tree.node_count());
  std::vector<std::vector<EventTree::Node>> by_depth(horizon + 1);
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) {
    by_depth[tree.depth(s)].push_back(s);
    if (tree.is_terminal(s)) continue;
    CarrierPtr moves = make_carrier(tree.child_labels(s));
    if (s == tree.root()) {
      locals[s] = remap_carrier(chain.initial(), moves);
    } else {
      // Last state of the sequence label.
      const std::string& label = tree.label(s);
      auto pos = label.rfind(',');
      std::string last = pos == std::string::npos ? label : label.substr(pos + 1);
      locals[s] = remap_carrier(chain.transition_from(chain.states()->index_of(last)), moves);
    }
  }

  UnrolledChain<T> out{ImpreciseProbabilityTree<T>(std::move(tree), std::move(locals)), {}};
  const EventTree& built = out.ipt.tree();
  for (int k = 1; k <= horizon; ++k)
    out.time_cuts.push_back(validate_cut(built, built.root(), by_depth[k]));
  return out;
}

// Lifts a time-n state gamble to a terminal gamble on the unrolled tree.
template <class T>
Gamble<T> lift_state_gamble(const UnrolledChain<T>& unrolled,
                            const ImpreciseMarkovChain<T>& chain, const Gamble<T>& f, int n) {
  const EventTree& tree = unrolled.ipt.tree();
  if (n < 1 || n > static_cast<int>(unrolled.time_cuts.size()))
    fail(Err::NonPositiveHorizon, "time index outside the unrolled horizon");
  if (!same_carrier(f.carrier(), chain.states()))
    fail(Err::CarrierMismatch, "gamble does not live on the state space");
  const Cut& cut = unrolled.time_cuts[n - 1];
  std::vector<T> values;
  auto terms = tree.terminals();
  values.reserve(terms.size());
  for (auto leaf : terms) {
    auto member = cut_member_through(tree, cut, leaf);
    const std::string& label = tree.label(member);
    auto pos = label.rfind(',');
    std::string last = pos == std::string::npos ? label : label.substr(pos + 1);
    values.push_back(f.at(last));
  }
  return Gamble<T>(terminal_carrier(tree, tree.root()), std::move(values));
}

struct BenchRow {
  int horizon = 0;
  double operator_seconds = 0;
  double value_operator = 0;
  std::optional<double> enumeration_seconds;
  std::optional<double> value_enumeration;
  std::uint64_t enumeration_assignments = 0;  // saturated count, always reported
};

namespace detail {

template <class F>
double time_adaptive(F&& run, int min_reps = 1) {
  using clock = std::chrono::steady_clock;
  int reps = min_reps;
  for (;;) {
    auto start = clock::now();
    for (int i = 0; i < reps; ++i) run();
    double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    if (elapsed >= 5e-3 || reps >= (1 << 22)) return elapsed / reps;
    reps *= 8;
  }
}

}  // namespace detail

// Wall-clock comparison of the linear operator iteration against the
// exponential credal enumeration on the unrolled tree. The enumeration
// column is filled only while its assignment count stays under `cap`; the
// predicted count is reported for every horizon.
inline std::vector<BenchRow> benchmark_scaling(const ImpreciseMarkovChain<double>& chain,
                                               const Gamble<double>& f,
                                               const std::vector<int>& horizons,
                                               std::uint64_t cap = kDefaultEnumerationCap) {
  std::vector<BenchRow> rows;
  for (int n : horizons) {
    BenchRow row;
    row.horizon = n;
    row.value_operator = state_lower_prevision(chain, f, n);
    row.operator_seconds =
        detail::time_adaptive([&] { (void)state_lower_prevision(chain, f, n); });

    // Predicted enumeration size: one vertex choice per non-terminal of the
    // unrolled tree. At depth k in 1..n-1 there are |X|^(k-1) situations
    // ending in each state x, each contributing that state's vertex count.
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> per_state_vertices;
    for (std::size_t x = 0; x < chain.state_count(); ++x)
      per_state_vertices.push_back(chain.transition_from(x).as_credal().extreme_points().size());
    std::uint64_t count = chain.initial().as_credal().extreme_points().size();
    std::uint64_t sequences_per_state = 1;  // |X|^(k-1)
    for (int k = 1; k < n && count != kMax; ++k) {
      for (std::size_t x = 0; x < chain.state_count() && count != kMax; ++x) {
        if (per_state_vertices[x] == 1) continue;
        for (std::uint64_t i = 0; i < sequences_per_state && count != kMax; ++i)
          count = saturating_mul(count, per_state_vertices[x]);
      }
      sequences_per_state = saturating_mul(sequences_per_state, chain.state_count());
    }
    row.enumeration_assignments = count;

    if (count <= cap) {
      auto unrolled = unroll_to_tree(chain, n);
      auto lifted = lift_state_gamble(unrolled, chain, f, n);
      auto once = [&] {
        return credal_enumeration_lower(unrolled.ipt, lifted, unrolled.ipt.tree().root(), cap)
            .lower;
      };
      row.value_enumeration = once();
      row.enumeration_seconds = detail::time_adaptive([&] { (void)once(); });
      row.enumeration_assignments =
          enumeration_count(unrolled.ipt, unrolled.ipt.tree().root());
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace iptree
