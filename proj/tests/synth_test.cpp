#include <gtest/gtest.h>

#include "causalbn/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causalbn;

namespace {

bool same_net(const DiscreteBayesNet& a, const DiscreteBayesNet& b) {
  if (!(a.dag() == b.dag()) || a.size() != b.size()) return false;
  for (int v = 0; v < static_cast<int>(a.size()); ++v)
    if (a.cpt(v).table != b.cpt(v).table || a.variable(v).states != b.variable(v).states) return false;
  return true;
}

std::size_t components(const Dag& g) {
  const int n = static_cast<int>(g.size());
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::size_t count = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (comp[static_cast<std::size_t>(v)] >= 0) continue;
      comp[static_cast<std::size_t>(v)] = static_cast<int>(count);
      for (int u = 0; u < n; ++u)
        if (g.adjacent(u, v)) stack.push_back(u);
    }
    ++count;
  }
  return count;
}

}  // namespace

TEST(RandomNet, Examples) {
  auto one = random_net(1, 0, {3}, 1);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(one.cpt(0).configurations(), 1u);
  EXPECT_EQ(one.cpt(0).table.size(), 3u);
  EXPECT_EQ(random_net(8, 0, {2}, 2).dag().edge_count(), 0u);
  EXPECT_TRUE(same_net(random_net(7, 3, {2, 3}, 3), random_net(7, 3, {2, 3}, 3)));
  EXPECT_FALSE(same_net(random_net(7, 3, {2, 3}, 3), random_net(7, 3, {2, 3}, 4)));
}

TEST(RandomNet, Errors) {
  EXPECT_THROW(random_net(0, 0, {2}, 1), Error);
  EXPECT_THROW(random_net(3, 3, {2}, 1), Error);
  EXPECT_THROW(random_net(3, 1, {}, 1), Error);
  EXPECT_THROW(random_net(3, 1, {1}, 1), Error);
}

TEST(RandomNet, ShapeInvariants) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t mp = rng.below(std::min<std::size_t>(n, 4));
    std::vector<std::size_t> pool{2, 3, 4};
    auto net = random_net(n, mp, pool, rng.next());
    EXPECT_TRUE(oracle::acyclic(oracle::from_dag(net.dag())));
    for (int v = 0; v < static_cast<int>(n); ++v) {
      EXPECT_LE(net.dag().parents(v).size(), mp);
      EXPECT_GE(net.cardinality(v), 2u);
      EXPECT_LE(net.cardinality(v), 4u);
      const auto& c = net.cpt(v);
      for (std::size_t r = 0; r < c.configurations(); ++r) {
        double s = 0;
        for (std::size_t k = 0; k < c.cardinality; ++k) {
          EXPECT_GE(c.at(r, k), 0.0);
          s += c.at(r, k);
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
  auto per_node = random_net(3, 1, {2, 3, 4}, 9);
  EXPECT_EQ(per_node.cardinality(0), 2u);
  EXPECT_EQ(per_node.cardinality(1), 3u);
  EXPECT_EQ(per_node.cardinality(2), 4u);
}

TEST(RandomNet, RowsFollowAFlatDirichlet) {
  // Under Dirichlet(1, 1, 1) each coordinate is Beta(1, 2): mean 1/3 and
  // variance 1/18.
  std::vector<double> xs;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    auto net = random_net(4, 2, {3}, seed);
    for (int v = 0; v < 4; ++v) xs.push_back(net.cpt(v).table[0]);
  }
  double mean = 0, var = 0;
  for (double x : xs) mean += x / static_cast<double>(xs.size());
  for (double x : xs) var += (x - mean) * (x - mean) / static_cast<double>(xs.size() - 1);
  const double se = std::sqrt(1.0 / 18.0 / static_cast<double>(xs.size()));
  EXPECT_NEAR(mean, 1.0 / 3.0, 5 * se);
  EXPECT_NEAR(var, 1.0 / 18.0, 0.01);
}

TEST(SepsisScenario, RosterAndConstraints) {
  auto s = sepsis_scenario(1);
  EXPECT_EQ(s.target, "Sepsis");
  EXPECT_EQ(s.net.size(), 36u);
  auto vars = sepsis_variables();
  ASSERT_EQ(vars.size(), 36u);
  for (int i = 0; i < 36; ++i) {
    EXPECT_EQ(s.net.variable(i).name, vars[static_cast<std::size_t>(i)].name);
    EXPECT_EQ(s.net.variable(i).states, vars[static_cast<std::size_t>(i)].states);
  }
  EXPECT_EQ(to_json(s.constraints), to_json(sepsis_constraints()));
  EXPECT_EQ(sepsis_required_edges().size(), 21u);
}

TEST(SepsisScenario, GroundTruthHonoursItsConstraints) {
  for (std::uint64_t seed : {1u, 2u, 3u, 17u, 123u}) {
    auto s = sepsis_scenario(seed);
    const auto& g = s.net.dag();
    for (const auto& [a, b] : sepsis_required_edges()) EXPECT_TRUE(g.has_edge(a, b)) << a << " -> " << b;
    for (const char* t : {"Age", "Gender", "Ethnic Group"}) EXPECT_TRUE(g.parents(g.index_of(t)).empty()) << t;
    ConstraintMask mask(s.constraints, g.nodes());
    EXPECT_TRUE(mask.satisfied_by(g));
    for (const auto& [a, b] : expand_tiers(s.constraints, g.nodes())) EXPECT_FALSE(g.has_edge(a, b));
    EXPECT_TRUE(oracle::acyclic(oracle::from_dag(g)));
    EXPECT_EQ(components(g), 1u);
    EXPECT_EQ(count_fragments(g), 1u);
    EXPECT_NEAR(static_cast<double>(g.edge_count()) / 36.0, 1.5, 0.1);
  }
}

TEST(SepsisScenario, PrevalenceIsTuned) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto s = sepsis_scenario(seed);
    EXPECT_GE(s.prevalence, 0.033);
    EXPECT_LE(s.prevalence, 0.039);
    EXPECT_NEAR(s.prevalence, 0.0356, 1e-6);
    EXPECT_NEAR(posterior(s.net, s.net.index_of("Sepsis"))[1], s.prevalence, 1e-12);
  }
  EXPECT_NEAR(sepsis_scenario(4, 0.2).prevalence, 0.2, 1e-6);
}

TEST(SepsisScenario, SampledPrevalenceAgrees) {
  auto s = sepsis_scenario(7);
  const std::size_t n = 200000;
  auto d = sample(s.net, n, 8);
  const int t = d.index_of("Sepsis");
  double pos = 0;
  for (std::size_t r = 0; r < n; ++r) pos += d.at(r, static_cast<std::size_t>(t)) == 1;
  const double sd = std::sqrt(s.prevalence * (1 - s.prevalence) / static_cast<double>(n));
  EXPECT_NEAR(pos / static_cast<double>(n), s.prevalence, 5 * sd);
}

TEST(SepsisScenario, DeterministicUnderSeed) {
  EXPECT_TRUE(same_net(sepsis_scenario(11).net, sepsis_scenario(11).net));
  EXPECT_FALSE(sepsis_scenario(11).net.dag() == sepsis_scenario(12).net.dag());
}
