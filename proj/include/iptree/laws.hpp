#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iptree/errors.hpp"
#include "iptree/event_tree.hpp"
#include "iptree/gamble.hpp"
#include "iptree/inference.hpp"
#include "iptree/oracle.hpp"

namespace iptree {

// A priced commitment at one situation: the subject buys the gamble h (on
// that situation's moves) for the price m.
struct Commitment {
  std::vector<double> h;
  double m = 0;
};

// Commitments at every situation from `base` up to (strictly before) the
// horizon cut, plus a uniform bound B on the oscillation of each h.
struct CommitmentPlan {
  EventTree::Node base = 0;
  Cut horizon;
  std::map<EventTree::Node, Commitment> commitments;
  double bound = 0;  // B
  int min_steps = 0; // N_U: least distance from base to the horizon
};

// Validates the plan against the tree and the local models:
//   - the horizon is a cut of base with every member at distance > 0,
//   - a commitment exists exactly at each s with base <= s < horizon,
//   - each h_s - m_s is locally desirable: local lower(h_s) >= m_s,
//   - inf h_s <= m_s and sup h_s - inf h_s <= B, with B > 0.
// When no bound is supplied, B is the largest oscillation (and must be
// positive: at least one commitment has to be a real commitment).
inline CommitmentPlan make_plan(const ImpreciseProbabilityTree<double>& ipt,
                                EventTree::Node base, Cut horizon,
                                std::map<EventTree::Node, Commitment> commitments,
                                std::optional<double> supplied_bound = std::nullopt) {
  const EventTree& tree = ipt.tree();
  Cut cut = validate_cut(tree, base, horizon.members);
  CommitmentPlan plan{base, std::move(cut), std::move(commitments), 0.0, 0};

  plan.min_steps = tree.depth_bound() + 1;
  for (auto u : plan.horizon.members) {
    int d = tree.distance(base, u);
    if (d == 0)
      fail(Err::InvalidPlan, "the horizon may not contain the base situation itself");
    plan.min_steps = std::min(plan.min_steps, d);
  }

  const double tol = 1e-12;
  double widest = 0;
  for (EventTree::Node s = base; s < base + tree.subtree_size(base); ++s) {
    bool in_region = strictly_before_cut(tree, plan.horizon, s);
    auto it = plan.commitments.find(s);
    if (!in_region) {
      if (it != plan.commitments.end())
        fail(Err::InvalidPlan,
             "commitment at '" + tree.label(s) + "' lies on or past the horizon");
      continue;
    }
    if (it == plan.commitments.end())
      fail(Err::InvalidPlan, "no commitment at '" + tree.label(s) + "'");
    const Commitment& c = it->second;
    if (c.h.size() != tree.children(s).size())
      fail(Err::InvalidPlan, "commitment gamble at '" + tree.label(s) +
                                 "' does not match that situation's moves");
    double lo = c.h[0], hi = c.h[0];
    for (double v : c.h) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (ipt.local(s).lower(c.h) < c.m - tol)
      fail(Err::InvalidPlan, "price at '" + tree.label(s) +
                                 "' exceeds the local lower prevision of its gamble");
    if (c.m < lo - tol || c.m > hi + tol)
      fail(Err::InvalidPlan,
           "price at '" + tree.label(s) + "' lies outside the range of its gamble");
    widest = std::max(widest, hi - lo);
  }

  if (supplied_bound) {
    if (*supplied_bound <= 0) fail(Err::InvalidPlan, "the oscillation bound B must be positive");
    if (*supplied_bound < widest - tol)
      fail(Err::InvalidPlan, "supplied bound B is smaller than an actual oscillation");
    plan.bound = *supplied_bound;
  } else {
    if (widest <= 0)
      fail(Err::InvalidPlan,
           "all commitments are constant; supply a positive bound B explicitly");
    plan.bound = widest;
  }
  return plan;
}

// The average gain along the path from the base to the horizon member u,
// summed in path order so the value depends only on on-path commitments.
inline double average_gain_at(const EventTree& tree, const CommitmentPlan& plan,
                              EventTree::Node u) {
  int steps = tree.distance(plan.base, u);
  double sum = 0;
  EventTree::Node s = plan.base;
  while (s != u) {
    int move = tree.move_index(s, u);
    const Commitment& c = plan.commitments.at(s);
    sum += c.h[move] - c.m;
    s = tree.children(s)[move];
  }
  return sum / steps;
}

// The horizon-measurable gain gamble G_U as a gamble on the horizon cut.
inline Gamble<double> gain_gamble(const EventTree& tree, const CommitmentPlan& plan) {
  std::vector<double> values;
  values.reserve(plan.horizon.members.size());
  for (auto u : plan.horizon.members) values.push_back(average_gain_at(tree, plan, u));
  return Gamble<double>(cut_carrier(tree, plan.horizon), std::move(values));
}

// Lower bound on the lower probability that the average gain stays above
// -epsilon: 1 - exp(-N epsilon^2 / (4 B^2)).
inline double wlln_bound(int min_steps, double epsilon, double bound) {
  if (min_steps <= 0 || epsilon <= 0 || bound <= 0)
    fail(Err::NonPositiveParameter, "N, epsilon and B must all be positive");
  return 1.0 - std::exp(-(static_cast<double>(min_steps) * epsilon * epsilon) /
                        (4.0 * bound * bound));
}

struct WllnReport {
  double exact_lower = 0;  // P({G >= -eps} | base) by backwards recursion
  double bound = 0;
  bool holds = false;
  std::optional<double> oracle_lower;  // populated when cross-checked
};

// Computes the exact lower probability of {G_U >= -epsilon} by recursion and
// compares it against the closed-form bound. Optionally cross-checks the
// recursion against the credal enumeration.
inline WllnReport verify_wlln(const ImpreciseProbabilityTree<double>& ipt,
                              const CommitmentPlan& plan, double epsilon,
                              bool oracle_check = false,
                              std::uint64_t cap = kDefaultEnumerationCap) {
  if (epsilon <= 0) fail(Err::NonPositiveParameter, "epsilon must be positive");
  const EventTree& tree = ipt.tree();
  auto gain = gain_gamble(tree, plan);

  auto terms = tree.terminals_through(plan.base);
  std::vector<double> indicator(terms.size(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    auto member = cut_member_through(tree, plan.horizon, terms[i]);
    if (gain.at(tree.label(member)) >= -epsilon) indicator[i] = 1.0;
  }
  Gamble<double> event(terminal_carrier(tree, plan.base), std::move(indicator));

  WllnReport report;
  report.exact_lower = predictive_lower(ipt, event, plan.base);
  report.bound = wlln_bound(plan.min_steps, epsilon, plan.bound);
  report.holds = report.exact_lower >= report.bound - 1e-12;
  if (oracle_check)
    report.oracle_lower = credal_enumeration_lower(ipt, event, plan.base, cap).lower;
  return report;
}

struct WitnessResult {
  Selection<double> selection;
  double alpha = 0;  // certified upper bound on the upper probability of {G < -eps}
  double delta = 0;  // internal step size epsilon / (2 B^2)
};

// The constructive hedging selection: at each situation s of the plan region
// it stakes lambda_s (h_s - m_s), where lambda_s is alpha delta times the
// running product of (1 + delta (m_v - h_v)) along the path into s. Its
// terminal gamble process satisfies, pointwise,
//     alpha - process >= indicator of {G_U < -epsilon},
// certifying alpha = exp(-N epsilon^2 / (4 B^2)) as an upper probability.
// Requires 0 < epsilon < B; at epsilon >= B the event is sure and no witness
// is needed.
inline WitnessResult wlln_witness_selection(const ImpreciseProbabilityTree<double>& ipt,
                                            const CommitmentPlan& plan, double epsilon) {
  const double B = plan.bound;
  if (epsilon <= 0 || epsilon >= B)
    fail(Err::EpsilonOutOfRange,
         "the witness construction needs 0 < epsilon < B; outside that range the "
         "event {G >= -epsilon} is sure");
  const EventTree& tree = ipt.tree();
  const double delta = epsilon / (2.0 * B * B);
  const double alpha =
      std::exp(-static_cast<double>(plan.min_steps) * epsilon * epsilon / (4.0 * B * B));

  Selection<double> sel = zero_selection<double>(tree, plan.base);
  // products[s] = prod over base <= v < s of (1 + delta (m_v - h_v(s))).
  std::vector<double> products(tree.node_count(), 1.0);
  for (EventTree::Node s = plan.base; s < plan.base + tree.subtree_size(plan.base); ++s) {
    if (!strictly_before_cut(tree, plan.horizon, s)) continue;
    const Commitment& c = plan.commitments.at(s);
    double lambda = alpha * delta * products[s];
    const auto& kids = tree.children(s);
    std::vector<double> choice(kids.size());
    for (std::size_t i = 0; i < kids.size(); ++i) {
      choice[i] = lambda * (c.h[i] - c.m);
      double factor = 1.0 + delta * (c.m - c.h[i]);
      if (factor <= 0)
        fail(Err::InvalidPlan, "internal: hedging factor is not positive at '" +
                                   tree.label(kids[i]) + "'");
      products[kids[i]] = products[s] * factor;
    }
    sel.choices[s] = std::move(choice);
  }
  return WitnessResult{std::move(sel), alpha, delta};
}

// Prequential score after Reality reaches the horizon member u: the
// certified upper probability exp(-N gamma^2 / 4) with gamma = G_U(u)/B in
// [-1, 0). Non-negative realized gains certify nothing and score 1. The
// value depends only on commitments along the realized path.
inline double prequential_score(const ImpreciseProbabilityTree<double>& ipt,
                                const CommitmentPlan& plan, EventTree::Node realized) {
  const EventTree& tree = ipt.tree();
  if (!plan.horizon.contains(realized))
    fail(Err::RealizedNotInHorizon,
         "'" + tree.label(realized) + "' is not a member of the plan's horizon");
  double gain = average_gain_at(tree, plan, realized);
  if (gain >= 0) return 1.0;
  double gamma = gain / plan.bound;
  return std::exp(-static_cast<double>(plan.min_steps) * gamma * gamma / 4.0);
}

inline double prequential_score(const ImpreciseProbabilityTree<double>& ipt,
                                const CommitmentPlan& plan, const std::string& realized) {
  return prequential_score(ipt, plan, ipt.tree().index_of(realized));
}

}  // namespace iptree
