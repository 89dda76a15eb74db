#include <doctest.h>

#include "iptree/generators.hpp"
#include "iptree/oracle.hpp"

using namespace iptree;
using doctest::Approx;

namespace {

Rational rat(long long p, long long q = 1) { return num<Rational>::from_ratio(p, q); }

PreciseTree<double> uniform_masses(const EventTree& tree) {
  PreciseTree<double> pt{&tree, std::vector<std::vector<double>>(tree.node_count())};
  for (EventTree::Node s = 0; s < tree.node_count(); ++s)
    if (!tree.is_terminal(s))
      pt.masses[s].assign(tree.children(s).size(), 1.0 / tree.children(s).size());
  return pt;
}

}  // namespace

TEST_CASE("precise expectations by backward recursion") {
  EventTree coin2 = two_coin_tree();
  auto omega = terminal_carrier(coin2, coin2.root());
  Gamble<double> heads_count(omega, {2, 1, 1, 0});
  auto fair = uniform_masses(coin2);
  CHECK(precise_expectation(fair, heads_count, coin2.root()) == Approx(1.0));

  // Degenerate masses trace one path.
  PreciseTree<double> degenerate{&coin2, std::vector<std::vector<double>>(coin2.node_count())};
  degenerate.masses[coin2.index_of("?,?")] = {0, 1};  // to t,?
  degenerate.masses[coin2.index_of("h,?")] = {1, 0};
  degenerate.masses[coin2.index_of("t,?")] = {0, 1};  // to t,t
  CHECK(precise_expectation(degenerate, heads_count, coin2.root()) ==
        heads_count.at("t,t"));

  EventTree coins = coins_tree(3);
  PreciseTree<double> biased{&coins, std::vector<std::vector<double>>(coins.node_count())};
  for (EventTree::Node s = 0; s < coins.node_count(); ++s)
    if (!coins.is_terminal(s)) biased.masses[s] = {0.6, 0.4};  // [tails, heads]
  auto heads3 = Gamble<double>::indicator(terminal_carrier(coins, coins.root()), {"h3"});
  CHECK(precise_expectation(biased, heads3, coins.root()) == Approx(0.064).epsilon(1e-12));
}

TEST_CASE("credal enumeration on the stopped coin flips") {
  auto ipt = coins_ipt<double>(3, 0.1);
  auto heads = Gamble<double>::indicator(terminal_carrier(ipt.tree(), ipt.tree().root()),
                                         {"h3"});
  auto result = credal_enumeration_lower(ipt, heads, ipt.tree().root());
  CHECK(result.lower == Approx(0.064).epsilon(1e-12));
  CHECK(result.assignments == 8);
  REQUIRE(result.argmin.size() == 3);
  // Vertex 0 of each local hull puts only 0.4 on heads; the minimising
  // assignment picks it everywhere and is reported lexicographically first.
  for (const auto& [node, vertex] : result.argmin) {
    (void)node;
    CHECK(vertex == 0);
  }
}

TEST_CASE("enumeration over a single-vertex tree is the precise expectation") {
  Rng rng(135);
  EventTree tree = random_tree(rng);
  std::vector<std::optional<LocalModel<double>>> locals(tree.node_count());
  PreciseTree<double> pt{&tree, std::vector<std::vector<double>>(tree.node_count())};
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) {
    if (tree.is_terminal(s)) continue;
    auto mass = random_mass(rng, tree.children(s).size());
    pt.masses[s] = mass;
    locals[s] = LocalModel<double>::precise(make_carrier(tree.child_labels(s)), mass);
  }
  ImpreciseProbabilityTree<double> ipt(std::move(tree), std::move(locals));
  auto f = random_terminal_gamble(rng, ipt.tree());
  auto result = credal_enumeration_lower(ipt, f, ipt.tree().root());
  CHECK(result.assignments == 1);
  pt.tree = &ipt.tree();
  CHECK(result.lower == Approx(precise_expectation(pt, f, ipt.tree().root())).epsilon(1e-12));
}

TEST_CASE("the urn as a one-step tree") {
  auto ipt = urn_one_step_ipt<Rational>();
  auto green = Gamble<Rational>::indicator(terminal_carrier(ipt.tree(), ipt.tree().root()),
                                           {"g"});
  auto result = credal_enumeration_lower(ipt, green, ipt.tree().root());
  CHECK(result.lower == rat(1, 4));
  CHECK(result.assignments == 3);
  REQUIRE(result.argmin.size() == 1);
  CHECK(result.argmin[0].second == 0);  // ties break to the lowest index
}

TEST_CASE("the enumeration cap refuses a depth-30 chain and reports 2^30") {
  auto ipt = coins_ipt<double>(30, 0.1);
  CHECK(enumeration_count(ipt, ipt.tree().root()) == std::uint64_t(1) << 30);
  auto heads = Gamble<double>::indicator(terminal_carrier(ipt.tree(), ipt.tree().root()),
                                         {"h30"});
  try {
    (void)credal_enumeration_lower(ipt, heads, ipt.tree().root());
    FAIL("expected the cap to refuse");
  } catch (const Error& e) {
    CHECK(e.code() == Err::EnumerationCapExceeded);
    CHECK(e.count() == std::uint64_t(1) << 30);
  }
}

TEST_CASE("oracle equivalence: recursion equals enumeration everywhere") {
  Rng rng(606060);
  for (int trial = 0; trial < 25; ++trial) {
    auto ipt = random_ipt(rng, {}, 3, 1 << 10);
    auto f = random_terminal_gamble(rng, ipt.tree());
    auto recursion = predictive_lower_all(ipt, f);
    auto enumerated = credal_enumeration_lower_all(ipt, f);
    for (EventTree::Node s = 0; s < ipt.tree().node_count(); ++s)
      CHECK(recursion[s] == Approx(enumerated[s]).epsilon(1e-9));
    // Spot-check the public per-situation operation against the sweep.
    std::uniform_int_distribution<int> node_d(0, ipt.tree().node_count() - 1);
    EventTree::Node t = node_d(rng);
    CHECK(credal_enumeration_lower(ipt, f, t).lower == Approx(recursion[t]).epsilon(1e-12));
  }
}

TEST_CASE("gamble processes accumulate selections") {
  auto ipt = coins_ipt<double>(2, 0.1);
  const auto& tree = ipt.tree();

  auto zero = zero_selection<double>(tree, tree.root());
  auto [zp, zt] = gamble_process(ipt, zero, tree.root());
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) CHECK(zp.at(s) == 0.0);
  for (std::size_t i = 0; i < zt.size(); ++i) CHECK(zt[i] == 0.0);

  // One-step tree: the terminal gamble is the chosen gamble itself.
  auto one = coins_ipt<double>(1, 0.1);
  Selection<double> stake{one.tree().root(), {}};
  stake.choices[one.tree().root()] = {-0.4, 0.6};  // heads indicator recentred
  auto [sp, st] = gamble_process(one, stake, one.tree().root());
  CHECK(st.at("t1") == -0.4);
  CHECK(st.at("h1") == 0.6);

  // An invalid selection (not locally desirable) is rejected.
  Selection<double> bad{one.tree().root(), {}};
  bad.choices[one.tree().root()] = {-1.0, 0.1};
  CHECK_THROWS_AS(gamble_process(one, bad, one.tree().root()), Error);
}

TEST_CASE("no selection loses on every path") {
  Rng rng(70707);
  for (int trial = 0; trial < 200; ++trial) {
    auto ipt = random_ipt(rng);
    std::uniform_int_distribution<int> node_d(0, ipt.tree().node_count() - 1);
    EventTree::Node t = node_d(rng);
    auto sel = random_valid_selection(rng, ipt, t);
    auto [process, terminal] = gamble_process(ipt, sel, t);
    double best = terminal[0];
    for (std::size_t i = 0; i < terminal.size(); ++i) best = std::max(best, terminal[i]);
    CHECK(best >= 0.0);  // exact: all values are dyadic
  }
}

TEST_CASE("cut decomposition of gamble processes is exact") {
  Rng rng(80808);
  for (int trial = 0; trial < 200; ++trial) {
    auto ipt = random_ipt(rng);
    const auto& tree = ipt.tree();
    std::uniform_int_distribution<int> node_d(0, tree.node_count() - 1);
    EventTree::Node t = node_d(rng);
    if (tree.is_terminal(t)) continue;
    auto sel = random_valid_selection(rng, ipt, t);
    Cut cut = random_cut(rng, tree, t);

    auto [full, full_terminal] = gamble_process(ipt, sel, t);
    auto off = call_off_selection(tree, sel, cut);
    auto [stopped_sel, stopped_terminal] = gamble_process(ipt, off, t);

    // Stopping the process at the cut is the called-off process.
    auto stopped = stop_process(tree, full, cut);
    for (EventTree::Node s = t; s < t + tree.subtree_size(t); ++s)
      CHECK(stopped.at(s) == stopped_sel.at(s));

    // And the full process splits into the stopped part plus per-member
    // continuations.
    auto terms = tree.terminals_through(t);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      EventTree::Node leaf = terms[i];
      EventTree::Node member = cut_member_through(tree, cut, leaf);
      double continuation = 0.0;
      if (!tree.is_terminal(member)) {
        auto sub = restrict_selection(tree, sel, member);
        auto [sub_process, sub_terminal] = gamble_process(ipt, sub, member);
        continuation = sub_process.at(leaf);
      }
      CHECK(full_terminal[i] == full.at(member) + continuation);
      CHECK(stopped_terminal[i] == full.at(member));
    }
  }
}

TEST_CASE("calling off at the children cut of a depth-1 base changes nothing") {
  auto one = coins_ipt<double>(1, 0.1);
  const auto& tree = one.tree();
  Selection<double> stake{tree.root(), {}};
  stake.choices[tree.root()] = {-0.4, 0.6};
  auto off = call_off_selection(tree, stake, children_cut(tree, tree.root()));
  CHECK(off.choices.at(tree.root()) == std::vector<double>{-0.4, 0.6});

  // The trivial cut {base} calls everything off.
  auto ipt = coins_ipt<double>(3, 0.1);
  auto sel = optimal_selection(
      ipt,
      Gamble<double>::indicator(terminal_carrier(ipt.tree(), ipt.tree().root()), {"h3"}),
      ipt.tree().root(), 0.0);
  Cut trivial{ipt.tree().root(), {ipt.tree().root()}};
  auto zeroed = call_off_selection(ipt.tree(), sel, trivial);
  for (const auto& [s, choice] : zeroed.choices)
    for (double v : choice) CHECK(v == 0.0);
}
