#include <doctest.h>

#include <algorithm>
#include <set>

#include "iptree/event_tree.hpp"
#include "iptree/generators.hpp"

using namespace iptree;

namespace {

Err code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Err::Parse;
}

}  // namespace

TEST_CASE("two-coin tree builds with seven situations") {
  EventTree tree = two_coin_tree();
  CHECK(tree.node_count() == 7);
  CHECK(tree.terminal_count() == 4);
  CHECK(tree.label(tree.root()) == "?,?");
  CHECK(tree.depth_bound() == 2);
  CHECK(tree.children(tree.root()).size() == 2);
}

TEST_CASE("single-node spec yields a tree whose root is terminal") {
  EventTree tree = EventTree::build({"only", {}});
  CHECK(tree.node_count() == 1);
  CHECK(tree.is_terminal(tree.root()));
  CHECK(tree.terminals_through(tree.root()).size() == 1);
  CHECK(tree.depth_bound() == 0);
}

TEST_CASE("coins(3) is the chain-with-leaves tree") {
  EventTree tree = coins_tree(3);
  CHECK(tree.node_count() == 7);
  std::set<std::string> omega;
  for (auto leaf : tree.terminals()) omega.insert(tree.label(leaf));
  CHECK(omega == std::set<std::string>{"t1", "t2", "t3", "h3"});
}

TEST_CASE("build rejects malformed specs") {
  CHECK(code_of([] {
          EventTree::build({"a", {{"a", {"b", "c"}}, {"a", {"d", "e"}}}});
        }) == Err::DuplicateId);
  CHECK(code_of([] {
          EventTree::build({"a", {{"a", {"b", "c"}}, {"b", {"a", "d"}}}});
        }) == Err::Cycle);
  CHECK(code_of([] {
          EventTree::build({"a", {{"a", {"b", "c"}}, {"b", {"c", "d"}}}});
        }) == Err::DuplicateId);
  CHECK(code_of([] { EventTree::build({"a", {{"a", {"b"}}}}); }) == Err::SingletonMoveSpace);
  CHECK(code_of([] {
          EventTree::build({"a", {{"a", {"b", "c"}}, {"z", {"x", "y"}}}});
        }) == Err::Disconnected);
}

TEST_CASE("precedes is the initial-segment order") {
  EventTree tree = two_coin_tree();
  CHECK(tree.precedes(tree.index_of("?,?"), tree.index_of("h,t")));
  CHECK(tree.precedes(tree.index_of("h,?"), tree.index_of("h,?")));
  CHECK_FALSE(tree.precedes(tree.index_of("h,?"), tree.index_of("t,t")));
  CHECK(code_of([&] { (void)tree.index_of("nope"); }) == Err::UnknownId);
}

TEST_CASE("validate_cut accepts the stopping time of the coin example") {
  EventTree tree = two_coin_tree();
  Cut cut = validate_cut(tree, "?,?", {"h,?", "t,h", "t,t"});
  CHECK(cut.members.size() == 3);

  CHECK(code_of([&] { validate_cut(tree, "?,?", {"h,?", "t,h"}); }) == Err::NotAPartition);
  CHECK(code_of([&] {
          validate_cut(tree, "?,?", {"h,?", "t,?", "t,h", "t,t"});
        }) == Err::NotAPartition);
  // The trivial cut of a situation by itself.
  CHECK(validate_cut(tree, "h,?", {"h,?"}).members.size() == 1);
}

TEST_CASE("children cut") {
  EventTree tree = two_coin_tree();
  Cut cut = children_cut(tree, tree.index_of("t,?"));
  REQUIRE(cut.members.size() == 2);
  CHECK(tree.label(cut.members[0]) == "t,h");
  CHECK(tree.label(cut.members[1]) == "t,t");

  EventTree coins = coins_tree(3);
  Cut first = children_cut(coins, coins.root());
  CHECK(coins.label(first.members[0]) == "t1");
  CHECK(coins.label(first.members[1]) == "h1");

  CHECK(code_of([&] { children_cut(tree, tree.index_of("h,t")); }) == Err::TerminalSituation);
}

TEST_CASE("paths through a situation") {
  EventTree tree = two_coin_tree();
  auto terms = tree.terminals_through(tree.index_of("h,?"));
  REQUIRE(terms.size() == 2);
  CHECK(tree.label(terms[0]) == "h,h");
  CHECK(tree.label(terms[1]) == "h,t");
  CHECK(tree.terminals_through(tree.index_of("t,t")).size() == 1);

  EventTree coins = coins_tree(3);
  auto h2 = coins.terminals_through(coins.index_of("h2"));
  std::set<std::string> labels;
  for (auto leaf : h2) labels.insert(coins.label(leaf));
  CHECK(labels == std::set<std::string>{"t3", "h3"});
}

TEST_CASE("distance counts arcs") {
  EventTree tree = two_coin_tree();
  CHECK(tree.distance(tree.root(), tree.index_of("h,t")) == 2);
  CHECK(tree.distance(tree.index_of("h,?"), tree.index_of("h,?")) == 0);
  EventTree coins = coins_tree(5);
  CHECK(coins.distance(coins.root(), coins.index_of("h3")) == 3);
  CHECK(code_of([&] { (void)tree.distance(tree.index_of("h,?"), tree.root()); }) ==
        Err::NotADescendant);
}

TEST_CASE("cuts tile the paths through their base") {
  Rng rng(20240817);
  for (int trial = 0; trial < 50; ++trial) {
    EventTree tree = random_tree(rng);
    Cut cut = random_cut(rng, tree, tree.root());
    std::size_t total = 0;
    std::set<EventTree::Node> seen;
    for (auto m : cut.members) {
      auto terms = tree.terminals_through(m);
      total += terms.size();
      for (auto leaf : terms) CHECK(seen.insert(leaf).second);
    }
    CHECK(total == tree.terminals().size());
    // The children cut is always accepted.
    CHECK_NOTHROW(validate_cut(tree, tree.root(), children_cut(tree, tree.root()).members));
  }
}

TEST_CASE("precedes is a partial order on random trees") {
  Rng rng(7);
  EventTree tree = random_tree(rng);
  const int n = tree.node_count();
  for (EventTree::Node a = 0; a < n; ++a) {
    CHECK(tree.precedes(a, a));
    for (EventTree::Node b = 0; b < n; ++b) {
      if (tree.precedes(a, b) && tree.precedes(b, a)) CHECK(a == b);
      for (EventTree::Node c = 0; c < n; ++c)
        if (tree.precedes(a, b) && tree.precedes(b, c)) CHECK(tree.precedes(a, c));
    }
  }
}

TEST_CASE("a finer cut refines a coarser one member by member") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    EventTree tree = random_tree(rng);
    Cut coarse = random_cut(rng, tree, tree.root(), 0.6);
    // Refine: replace each non-terminal member by a random cut of it.
    std::vector<EventTree::Node> fine_members;
    for (auto m : coarse.members) {
      Cut sub = random_cut(rng, tree, m, 0.3);
      fine_members.insert(fine_members.end(), sub.members.begin(), sub.members.end());
    }
    Cut fine = validate_cut(tree, tree.root(), fine_members);
    for (auto v : fine.members) {
      int above = 0;
      for (auto u : coarse.members)
        if (tree.precedes(u, v)) ++above;
      CHECK(above == 1);
    }
  }
}
