#include <doctest.h>

#include <cmath>

#include "iptree/generators.hpp"
#include "iptree/inference.hpp"
#include "iptree/oracle.hpp"

using namespace iptree;
using doctest::Approx;

namespace {

Rational rat(long long p, long long q = 1) { return num<Rational>::from_ratio(p, q); }

Gamble<double> heads_indicator(const ImpreciseProbabilityTree<double>& ipt, int n) {
  return Gamble<double>::indicator(terminal_carrier(ipt.tree(), ipt.tree().root()),
                                   {"h" + std::to_string(n)});
}

}  // namespace

TEST_CASE("stopped coin flips: lower probability of all heads") {
  for (double delta : {0.0, 0.1, 0.25}) {
    for (int n = 1; n <= 6; ++n) {
      auto ipt = coins_ipt<double>(n, delta);
      auto heads = heads_indicator(ipt, n);
      for (int k = 0; k < n; ++k) {
        double expected = std::pow(0.5 - delta, n - k);
        CHECK(predictive_lower(ipt, heads, "h" + std::to_string(k)) ==
              Approx(expected).epsilon(1e-12));
        CHECK(predictive_upper(ipt, heads, "h" + std::to_string(k)) ==
              Approx(std::pow(0.5 + delta, n - k)).epsilon(1e-12));
      }
    }
  }
  auto ipt3 = coins_ipt<double>(3, 0.1);
  CHECK(predictive_lower(ipt3, heads_indicator(ipt3, 3), ipt3.tree().root()) ==
        Approx(0.064).epsilon(1e-12));
}

TEST_CASE("exact recursion in rationals") {
  auto ipt = coins_ipt<Rational>(3, rat(1, 10));
  auto heads = Gamble<Rational>::indicator(terminal_carrier(ipt.tree(), ipt.tree().root()),
                                           {"h3"});
  CHECK(predictive_lower(ipt, heads, std::string("h0")) == rat(8, 125));
  CHECK(predictive_upper(ipt, heads, std::string("h0")) == rat(27, 125));
}

TEST_CASE("normalisation and terminal situations") {
  auto ipt = coins_ipt<double>(4, 0.2);
  const auto& tree = ipt.tree();
  auto c = Gamble<double>::constant(terminal_carrier(tree, tree.root()), 3.25);
  for (EventTree::Node s = 0; s < tree.node_count(); ++s) {
    CHECK(predictive_lower(ipt, c, s) == Approx(3.25));
    CHECK(predictive_upper(ipt, c, s) == Approx(3.25));
  }
  // At a terminal, lower = upper = the value there.
  auto heads = heads_indicator(ipt, 4);
  CHECK(predictive_lower(ipt, heads, std::string("h4")) == 1.0);
  CHECK(predictive_upper(ipt, heads, std::string("h4")) == 1.0);
  CHECK(predictive_lower(ipt, heads, std::string("t2")) == 0.0);
}

TEST_CASE("the prevision depends only on values over the conditioning event") {
  auto ipt = coins_ipt<double>(3, 0.1);
  const auto& tree = ipt.tree();
  auto omega = terminal_carrier(tree, tree.root());
  Gamble<double> f(omega, {5, -3, 0.25, 1});
  Gamble<double> g(omega, {-9, 7, 0.25, 1});  // differs only off the h2 subtree
  EventTree::Node h2 = tree.index_of("h2");
  CHECK(predictive_lower(ipt, f, h2) == predictive_lower(ipt, g, h2));
}

TEST_CASE("previsions on cuts") {
  auto ipt = coins_ipt<double>(3, 0.1);
  const auto& tree = ipt.tree();
  auto heads = heads_indicator(ipt, 3);
  Cut first = validate_cut(tree, "h0", {"t1", "h1"});
  auto on_cut = predictive_lower_on_cut(ipt, heads, first);
  CHECK(on_cut.at("t1") == 0.0);
  CHECK(on_cut.at("h1") == Approx(0.16).epsilon(1e-12));

  Cut trivial = validate_cut(tree, "h1", {"h1"});
  auto single = predictive_lower_on_cut(ipt, heads, trivial);
  CHECK(single.at("h1") == Approx(predictive_lower(ipt, heads, std::string("h1"))));

  // Two fair precise flips: expected heads count by subtree.
  EventTree coin2 = two_coin_tree();
  std::vector<std::optional<LocalModel<double>>> locals(coin2.node_count());
  for (EventTree::Node s = 0; s < coin2.node_count(); ++s)
    if (!coin2.is_terminal(s))
      locals[s] = LocalModel<double>::precise(make_carrier(coin2.child_labels(s)), {0.5, 0.5});
  ImpreciseProbabilityTree<double> fair(std::move(coin2), std::move(locals));
  auto omega = terminal_carrier(fair.tree(), fair.tree().root());
  Gamble<double> heads_count(omega, {2, 1, 1, 0});
  auto by_first = predictive_lower_on_cut(fair, heads_count,
                                          children_cut(fair.tree(), fair.tree().root()));
  CHECK(by_first.at("h,?") == Approx(1.5));
  CHECK(by_first.at("t,?") == Approx(0.5));
}

TEST_CASE("membership in the natural extension") {
  auto ipt = coins_ipt<double>(3, 0.1);
  auto omega = terminal_carrier(ipt.tree(), ipt.tree().root());
  CHECK(natural_extension_member(ipt, Gamble<double>(omega, {0.5, 0.0, 1.0, 0.25})));
  CHECK_FALSE(natural_extension_member(ipt, heads_indicator(ipt, 3) - 0.07));

  // The boundary case is exact in rational mode: 0.064 is 8/125.
  auto exact = coins_ipt<Rational>(3, rat(1, 10));
  auto heads = Gamble<Rational>::indicator(terminal_carrier(exact.tree(), exact.tree().root()),
                                           {"h3"});
  CHECK(natural_extension_member(exact, heads - rat(8, 125)));
  CHECK_FALSE(natural_extension_member(exact, heads - rat(8, 125) - rat(1, 1000000)));
}

TEST_CASE("the optimal selection telescopes through two stopped flips") {
  auto ipt = coins_ipt<double>(2, 0.1);
  const auto& tree = ipt.tree();
  auto heads = heads_indicator(ipt, 2);
  auto sel = optimal_selection(ipt, heads, tree.root(), 0.0);
  const auto& at_root = sel.choices.at(tree.index_of("h0"));
  CHECK(at_root[0] == Approx(-0.16).epsilon(1e-12));  // tails move
  CHECK(at_root[1] == Approx(0.24).epsilon(1e-12));   // heads move
  const auto& at_h1 = sel.choices.at(tree.index_of("h1"));
  CHECK(at_h1[0] == Approx(-0.4).epsilon(1e-12));
  CHECK(at_h1[1] == Approx(0.6).epsilon(1e-12));

  double price = predictive_lower(ipt, heads, tree.root());
  auto [process, terminal] = gamble_process(ipt, sel, tree.root());
  for (std::size_t i = 0; i < terminal.size(); ++i)
    CHECK(heads[i] - price >= terminal[i] - 1e-12);

  CHECK_THROWS_AS(optimal_selection(ipt, heads, tree.root(), -0.1), Error);
}

TEST_CASE("constant gambles admit the zero selection; vacuous trees price at the min") {
  auto ipt = coins_ipt<double>(3, 0.1);
  const auto& tree = ipt.tree();
  auto omega = terminal_carrier(tree, tree.root());
  auto sel = optimal_selection(ipt, Gamble<double>::constant(omega, 2.0), tree.root(), 0.0);
  for (const auto& [s, choice] : sel.choices)
    for (double v : choice) CHECK(v == 0.0);

  EventTree vac_tree = coins_tree(3);
  std::vector<std::optional<LocalModel<double>>> locals(vac_tree.node_count());
  for (EventTree::Node s = 0; s < vac_tree.node_count(); ++s)
    if (!vac_tree.is_terminal(s))
      locals[s] = LocalModel<double>::vacuous(make_carrier(vac_tree.child_labels(s)));
  ImpreciseProbabilityTree<double> vac(std::move(vac_tree), std::move(locals));
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_terminal_gamble(rng, vac.tree());
    CHECK(predictive_lower(vac, f, vac.tree().root()) == Approx(f.min_value()));
    CHECK(predictive_upper(vac, f, vac.tree().root()) == Approx(f.max_value()));
    // The zero selection certifies exactly that price.
    auto zero = zero_selection<double>(vac.tree(), vac.tree().root());
    CHECK(selection_certified_bound(vac, zero, f) == Approx(f.min_value()));
  }
}

TEST_CASE("coherence suite for predictive previsions on random trees") {
  Rng rng(1515);
  for (int trial = 0; trial < 40; ++trial) {
    auto ipt = random_ipt(rng);
    const auto& tree = ipt.tree();
    auto f = random_terminal_gamble(rng, tree);
    auto g = random_terminal_gamble(rng, tree);
    std::uniform_int_distribution<int> node_d(0, tree.node_count() - 1);
    EventTree::Node t = node_d(rng);

    double pf = predictive_lower(ipt, f, t);
    double pg = predictive_lower(ipt, g, t);
    double uf = predictive_upper(ipt, f, t);

    double lo = 1e300, hi = -1e300;
    for (auto leaf : tree.terminals_through(t)) {
      lo = std::min(lo, f.at(tree.label(leaf)));
      hi = std::max(hi, f.at(tree.label(leaf)));
    }
    CHECK(pf >= lo - 1e-12);
    CHECK(pf <= uf + 1e-12);
    CHECK(uf <= hi + 1e-12);
    CHECK(predictive_lower(ipt, f + g, t) >= pf + pg - 1e-12);
    double lambda = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    CHECK(predictive_lower(ipt, lambda * f, t) == Approx(lambda * pf).epsilon(1e-12));
    double shift = dyadic(rng);
    CHECK(predictive_lower(ipt, f + shift, t) == Approx(pf + shift).epsilon(1e-12));
    CHECK(uf == Approx(-predictive_lower(ipt, -f, t)).epsilon(1e-12));
    // Monotonicity against a dominating gamble.
    auto h = f + std::abs(dyadic(rng));
    CHECK(predictive_lower(ipt, h, t) >= pf - 1e-12);
  }
}

TEST_CASE("iterated expectation holds with equality through every sampled cut") {
  Rng rng(2626);
  for (int trial = 0; trial < 40; ++trial) {
    auto ipt = random_ipt(rng);
    const auto& tree = ipt.tree();
    auto f = random_terminal_gamble(rng, tree);
    std::uniform_int_distribution<int> node_d(0, tree.node_count() - 1);
    EventTree::Node t = node_d(rng);
    Cut cut = random_cut(rng, tree, t);
    auto on_cut = predictive_lower_on_cut(ipt, f, cut);
    auto embedded = embed_from_cut(tree, on_cut, cut);
    CHECK(predictive_lower(ipt, f, t) ==
          Approx(predictive_lower(ipt, embedded, t)).epsilon(1e-9));
  }
}

TEST_CASE("separate coherence") {
  Rng rng(3737);
  for (int trial = 0; trial < 30; ++trial) {
    auto ipt = random_ipt(rng);
    const auto& tree = ipt.tree();
    std::uniform_int_distribution<int> node_d(0, tree.node_count() - 1);
    EventTree::Node t = node_d(rng);
    Cut cut = random_cut(rng, tree, t);
    auto f = random_terminal_gamble(rng, tree);

    // P(paths through t | t) = 1.
    auto through = Gamble<double>::indicator(terminal_carrier(tree, tree.root()), [&] {
      std::vector<std::string> labels;
      for (auto leaf : tree.terminals_through(t)) labels.push_back(tree.label(leaf));
      return labels;
    }());
    CHECK(predictive_lower(ipt, through, t) == Approx(1.0));

    // Cut-measurable gambles are read off, added, and factored out.
    std::vector<double> gv(cut.members.size());
    for (auto& v : gv) v = std::abs(dyadic(rng));
    Gamble<double> g_on_cut(cut_carrier(tree, cut), gv);
    auto g = embed_from_cut(tree, g_on_cut, cut);

    for (std::size_t i = 0; i < cut.members.size(); ++i) {
      EventTree::Node u = cut.members[i];
      double pg = predictive_lower(ipt, g, u);
      CHECK(pg == Approx(g_on_cut[i]).epsilon(1e-12));
      double pf = predictive_lower(ipt, f, u);
      CHECK(predictive_lower(ipt, f + g, u) == Approx(pf + g_on_cut[i]).epsilon(1e-12));
      // g >= 0 and constant on the subtree of u, so it scales out.
      auto product = g.map([&](const double&) { return 0.0; });
      (void)product;
      std::vector<double> prod_values(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) prod_values[j] = g[j] * f[j];
      Gamble<double> gf(g.carrier(), prod_values);
      CHECK(predictive_lower(ipt, gf, u) == Approx(g_on_cut[i] * pf).epsilon(1e-9));
    }
  }
}

TEST_CASE("matching: selections certify at most the recursion price and attain it") {
  Rng rng(4848);
  for (int trial = 0; trial < 40; ++trial) {
    auto ipt = random_ipt(rng);
    const auto& tree = ipt.tree();
    auto f = random_terminal_gamble(rng, tree);
    std::uniform_int_distribution<int> node_d(0, tree.node_count() - 1);
    EventTree::Node t = node_d(rng);
    double price = predictive_lower(ipt, f, t);

    auto best = optimal_selection(ipt, f, t, 0.0);
    CHECK(selection_certified_bound(ipt, best, f) == Approx(price).epsilon(1e-9));

    for (int k = 0; k < 5; ++k) {
      auto sel = random_valid_selection(rng, ipt, t);
      CHECK(selection_certified_bound(ipt, sel, f) <= price + 1e-9);
    }
  }
}

TEST_CASE("called-off optimal selections keep the guarantee for cut-measurable gambles") {
  Rng rng(5959);
  for (int trial = 0; trial < 30; ++trial) {
    auto ipt = random_ipt(rng);
    const auto& tree = ipt.tree();
    std::uniform_int_distribution<int> node_d(0, tree.node_count() - 1);
    EventTree::Node t = node_d(rng);
    Cut cut = random_cut(rng, tree, t);
    std::vector<double> gv(cut.members.size());
    for (auto& v : gv) v = dyadic(rng);
    auto f = embed_from_cut(tree, Gamble<double>(cut_carrier(tree, cut), gv), cut);

    double price = predictive_lower(ipt, f, t);
    auto sel = optimal_selection(ipt, f, t, 0.0);
    auto off = call_off_selection(tree, sel, cut);
    auto [process, terminal] = gamble_process(ipt, off, t);
    const auto& tc = ipt.tree();
    auto terms = tc.terminals_through(t);
    for (std::size_t i = 0; i < terms.size(); ++i)
      CHECK(f.at(tc.label(terms[i])) - price >= terminal[i] - 1e-9);
  }
}
