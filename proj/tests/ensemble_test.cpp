#include <gtest/gtest.h>

#include <set>

#include "causalbn/bayesnet.hpp"
#include "causalbn/ensemble.hpp"
#include "causalbn/learners.hpp"
#include "causalbn/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causalbn;

namespace {

std::vector<Dag> repeat(const Dag& g, std::size_t k) { return std::vector<Dag>(k, g); }

std::set<NamedEdge> edge_set(const Dag& g) {
  auto e = g.named_edges();
  return {e.begin(), e.end()};
}

// K random DAGs over the same nodes, each a noisy copy of a shared base.
std::vector<Dag> noisy_copies(Rng& rng, std::size_t nodes, std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nodes; ++i) names.push_back("V" + std::to_string(i));
  Dag base(names);
  for (int t = 0; t < static_cast<int>(nodes) * 2; ++t) base.try_add_edge(rng.below(nodes), rng.below(nodes));
  std::vector<Dag> out;
  for (std::size_t i = 0; i < k; ++i) {
    Dag g = base;
    for (int t = 0; t < 3; ++t) {
      int a = static_cast<int>(rng.below(nodes)), b = static_cast<int>(rng.below(nodes));
      if (a == b) continue;
      if (g.has_edge(a, b)) {
        if (rng.below(2)) g.remove_edge(a, b);
        else if (g.can_reverse_edge(a, b)) g.reverse_edge(a, b);
      } else {
        g.try_add_edge(a, b);
      }
    }
    out.push_back(g);
  }
  return out;
}

// Brute-force tally: count each oriented edge across the inputs.
std::map<NamedEdge, std::size_t> count_edges(const std::vector<Dag>& gs) {
  std::map<NamedEdge, std::size_t> c;
  for (const auto& g : gs)
    for (const auto& e : g.named_edges()) ++c[e];
  return c;
}

}  // namespace

TEST(TallyEdges, Examples) {
  std::vector<std::string> n{"A", "B"};
  std::vector<Dag> gs;
  for (int i = 0; i < 4; ++i) gs.push_back(Dag(n, {{"A", "B"}}));
  for (int i = 0; i < 2; ++i) gs.push_back(Dag(n, {{"B", "A"}}));
  auto t = tally_edges(gs);
  EXPECT_EQ(t.k, 6u);
  EXPECT_EQ(t.count("A", "B"), 4u);
  EXPECT_EQ(t.count("B", "A"), 2u);

  auto absent = tally_edges(std::vector<Dag>{Dag({"A", "B", "C"}, {{"A", "B"}})});
  EXPECT_EQ(absent.pairs.count({"A", "C"}), 0u);
  EXPECT_EQ(absent.pairs.count({"B", "C"}), 0u);

  Dag g({"A", "B", "C", "D"}, {{"A", "B"}, {"C", "B"}, {"D", "A"}});
  auto same = tally_edges(repeat(g, 6));
  for (const auto& [p, c] : same.pairs) {
    EXPECT_TRUE(c.forward == 0 || c.forward == 6);
    EXPECT_TRUE(c.backward == 0 || c.backward == 6);
  }
}

TEST(TallyEdges, MatchesBruteForceCounts) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto gs = noisy_copies(rng, 6, 1 + rng.below(8));
    auto t = tally_edges(gs);
    auto expected = count_edges(gs);
    std::map<NamedEdge, std::size_t> got;
    for (const auto& [e, c] : t.oriented()) got[e] = c;
    EXPECT_EQ(got, expected);
    for (const auto& [p, c] : t.pairs) EXPECT_LE(c.total(), t.k);
  }
}

TEST(TallyEdges, NodeMismatchAndEmptyInput) {
  EXPECT_THROW(tally_edges(std::vector<Dag>{Dag({"A", "B"}), Dag({"A", "C"})}), GraphError);
  EXPECT_THROW(tally_edges(std::vector<Dag>{}), GraphError);
}

TEST(TallyEdges, CountsUndirectedPdagEdgesSeparately) {
  Pdag p({"A", "B", "C"});
  p.add_undirected("A", "B");
  p.add_directed("B", "C");
  auto t = tally_edges(std::vector<Pdag>{p, p});
  EXPECT_EQ(t.pairs.at({"A", "B"}).undirected, 2u);
  EXPECT_EQ(t.count("B", "C"), 2u);
}

TEST(Assemble, CycleIsReversed) {
  EdgeTally t;
  t.nodes = {"A", "B", "C"};
  t.k = 6;
  t.pairs[{"A", "B"}].forward = 6;
  t.pairs[{"B", "C"}].forward = 5;
  t.pairs[{"A", "C"}].backward = 4;  // C -> A
  AssemblyLog log;
  auto g = assemble(t, 1, {}, &log);
  EXPECT_EQ(edge_set(g), (std::set<NamedEdge>{{"A", "B"}, {"B", "C"}, {"A", "C"}}));
  EXPECT_EQ(log.reversed, (std::vector<NamedEdge>{{"A", "C"}}));
  EXPECT_TRUE(log.dropped.empty());
}

TEST(Assemble, TieUsesPreferenceThenAcyclicityThenName) {
  EdgeTally t;
  t.nodes = {"A", "B"};
  t.k = 6;
  t.pairs[{"A", "B"}] = {3, 3, 0};
  KnowledgeConstraints prefer_ab;
  prefer_ab.orientation_preferences = {{"A", "B", true}};
  EXPECT_TRUE(assemble(t, 1, prefer_ab).has_edge("A", "B"));
  KnowledgeConstraints prefer_ba;
  prefer_ba.orientation_preferences = {{"A", "B", false}};
  EXPECT_TRUE(assemble(t, 1, prefer_ba).has_edge("B", "A"));
  EXPECT_TRUE(assemble(t, 1, {}).has_edge("A", "B"));

  // Without a preference, the orientation that stays acyclic wins.
  EdgeTally c;
  c.nodes = {"A", "B", "C"};
  c.k = 6;
  c.pairs[{"A", "C"}].backward = 6;  // C -> A
  c.pairs[{"B", "C"}].forward = 5;   // B -> C
  c.pairs[{"A", "B"}] = {2, 2, 0};
  auto g = assemble(c, 1, {});
  EXPECT_TRUE(g.has_edge("B", "A"));
}

TEST(Assemble, UnanimousEdgeAtFullThreshold) {
  Dag g({"A", "B", "C"}, {{"A", "B"}});
  auto gs = repeat(g, 5);
  gs[0].add_edge("B", "C");
  EXPECT_EQ(edge_set(assemble(tally_edges(gs), 5, {})), (std::set<NamedEdge>{{"A", "B"}}));
  EXPECT_THROW(assemble(tally_edges(gs), 0, {}), Error);
  EXPECT_THROW(assemble(tally_edges(gs), 6, {}), Error);
}

TEST(Assemble, RequiredFirstForbiddenNever) {
  EdgeTally t;
  t.nodes = {"A", "B", "C"};
  t.k = 3;
  t.pairs[{"A", "B"}].backward = 3;  // B -> A, unanimous
  t.pairs[{"B", "C"}].forward = 3;
  KnowledgeConstraints k;
  k.required = {{"A", "C"}};
  k.forbidden = {{"B", "C"}, {"C", "B"}};
  auto g = assemble(t, 3, k);
  EXPECT_EQ(edge_set(g), (std::set<NamedEdge>{{"A", "C"}, {"B", "A"}}));
}

TEST(Assemble, PropertiesOnRandomTallies) {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto gs = noisy_copies(rng, 7, 6);
    auto t = tally_edges(gs);
    auto names = t.nodes;
    KnowledgeConstraints k;
    k.forbidden = {{names[0], names[1]}};
    k.required = {{names[2], names[3]}};
    if (!validate(k, names).ok()) continue;
    ConstraintMask mask(k, names);
    std::set<NamedEdge> unanimous;
    for (const auto& [e, c] : count_edges(gs))
      if (c == t.k) unanimous.insert(e);
    std::optional<Dag> sparser;
    for (std::size_t l = t.k; l >= 1; --l) {
      AssemblyLog log;
      auto g = assemble(t, l, k, &log);
      EXPECT_TRUE(oracle::acyclic(oracle::from_dag(g)));
      EXPECT_TRUE(mask.satisfied_by(g));
      // Every edge is supported at this threshold in one of its orientations.
      for (const auto& [a, b] : g.named_edges())
        if (!mask.required(g.index_of(a), g.index_of(b))) {
          EXPECT_GE(std::max(t.count(a, b), t.count(b, a)), l);
        }
      // Higher thresholds only remove edges.
      if (sparser) {
        auto big = edge_set(g);
        for (const auto& e : edge_set(*sparser)) EXPECT_TRUE(big.count(e)) << e.first << "->" << e.second << " L=" << l;
      }
      std::set<NamedEdge> gone(log.dropped.begin(), log.dropped.end());
      for (const auto& e : unanimous)
        if (!gone.count(e) && !mask.forbidden(g.index_of(e.first), g.index_of(e.second))) {
          EXPECT_TRUE(g.has_edge(e.first, e.second) || g.has_edge(e.second, e.first));
        }
      EXPECT_EQ(assemble(t, l, k), g);
      sparser = g;
    }
  }
}

TEST(SelectByBic, IdenticalInputsGiveTheInput) {
  auto net = random_net(5, 2, {2, 3}, 11);
  auto d = sample(net, 2000, 12);
  auto f = select_by_bic(tally_edges(repeat(net.dag(), 6)), d, {});
  ASSERT_EQ(f.graphs.size(), 6u);
  for (const auto& [l, g] : f.graphs) EXPECT_EQ(g, net.dag());
  EXPECT_EQ(f.selected_l, 6u);
  EXPECT_EQ(f.selected(), net.dag());
}

TEST(SelectByBic, WeakLearnerNoiseIsFilteredOut) {
  // Truth A -> B -> C with an independent D. Five learners find the truth,
  // one adds two spurious edges that only survive at L = 1.
  std::vector<Variable> vars{fixture::var("A", 2), fixture::var("B", 2), fixture::var("C", 2), fixture::var("D", 3)};
  Dag truth({"A", "B", "C", "D"}, {{"A", "B"}, {"B", "C"}});
  DiscreteBayesNet net(truth, vars, {{0.6, 0.4}, {0.8, 0.2, 0.25, 0.75}, {0.7, 0.3, 0.2, 0.8}, {0.3, 0.3, 0.4}});
  auto d = sample(net, 5000, 13);
  auto gs = repeat(truth, 5);
  Dag noisy = truth;
  noisy.add_edge("A", "D");
  noisy.add_edge("C", "D");
  gs.push_back(noisy);
  auto f = select_by_bic(tally_edges(gs), d, {});
  for (const auto& [l, g] : f.graphs) EXPECT_NEAR(f.bic.at(l), oracle::bic(g, d), 1e-6 * std::abs(f.bic.at(l)));
  EXPECT_EQ(f.graphs.at(1), noisy);
  EXPECT_LT(oracle::bic(noisy, d), oracle::bic(truth, d));
  EXPECT_GE(f.selected_l, 2u);
  EXPECT_EQ(f.selected(), truth);
}

TEST(SelectByBic, TiesFavourTheSparserThreshold) {
  auto d = fixture::uniform({"A", "B"}, {2, 2}, 500, 14);
  auto f = select_by_bic(tally_edges(repeat(Dag({"A", "B"}), 3)), d, {});
  EXPECT_EQ(f.selected_l, 3u);
}

TEST(SelectByBic, LearnerOutputsEndToEnd) {
  auto net = random_net(6, 2, {2, 3}, 21);
  auto d = sample(net, 3000, 22);
  std::vector<Dag> dags;
  for (const auto& r : learn_all(d, LearnerConfig{}, {})) dags.push_back(r.dag);
  auto f = select_by_bic(tally_edges(dags), d, {});
  double best = -1e300;
  for (const auto& [l, s] : f.bic) best = std::max(best, s);
  EXPECT_EQ(f.bic.at(f.selected_l), best);
  for (const auto& [l, s] : f.bic)
    if (l > f.selected_l) {
      EXPECT_LT(s, best);
    }
  auto j = to_json(f);
  EXPECT_EQ(j["selected_L"], f.selected_l);
  EXPECT_EQ(j["members"].size(), 6u);
  EXPECT_EQ(to_json(tally_edges(dags))["k"], 6);
}
