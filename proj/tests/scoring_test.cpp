#include <gtest/gtest.h>

#include <cmath>
#include <future>
#include <map>
#include <vector>

#include "causalbn/scoring.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace causalbn;

namespace {

std::vector<std::string> letters(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i)));
  return out;
}

// Dataset sampled from a random chain-ish structure so scores are informative.
CategoricalDataset dependent_data(int n, std::size_t rows, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> cards;
  for (int i = 0; i < n; ++i) cards.push_back(2 + rng.below(2));
  std::vector<std::vector<std::int32_t>> cols(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < rows; ++r)
    for (int v = 0; v < n; ++v) {
      std::int32_t x = static_cast<std::int32_t>(rng.below(cards[static_cast<std::size_t>(v)]));
      if (v > 0 && rng.uniform() < 0.6)
        x = cols[static_cast<std::size_t>(v - 1)].back() % static_cast<std::int32_t>(cards[static_cast<std::size_t>(v)]);
      cols[static_cast<std::size_t>(v)].push_back(x);
    }
  return fixture::table(letters(n), cards, cols);
}

// Chi-squared upper tail in closed form for one and two degrees of freedom.
double chi2_tail(double x, int dof) { return dof == 1 ? std::erfc(std::sqrt(x / 2)) : std::exp(-x / 2); }

}  // namespace

TEST(FreeParameters, Examples) {
  auto d = fixture::table({"A", "B", "C", "T", "F"}, {2, 2, 2, 3, 4},
                          {{0, 1}, {0, 1}, {0, 1}, {0, 2}, {0, 3}});
  EXPECT_EQ(free_parameters(Dag({"A"}), d.select({"A"})), 1);
  EXPECT_EQ(free_parameters(Dag({"A", "B", "C"}, {{"B", "A"}, {"C", "A"}}), d.select({"A", "B", "C"})) - 2, 4);
  EXPECT_EQ(free_parameters(Dag({"T", "F"}, {{"F", "T"}}), d) - 3, 8);
  EXPECT_THROW(free_parameters(Dag({"Z"}), d), DataError);
}

TEST(LogLikelihood, Examples) {
  auto d = fixture::table({"X"}, {2}, {{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}});
  EXPECT_NEAR(log_likelihood(Dag({"X"}), d), 10 * std::log(0.5), 1e-12);
  EXPECT_NEAR(log_likelihood(Dag({"X"}), d), -6.9315, 5e-5);
  auto constant = fixture::table({"X"}, {2}, {{1, 1, 1, 1}});
  EXPECT_EQ(log_likelihood(Dag({"X"}), constant), 0.0);
}

TEST(LogLikelihood, AddingAnEdgeNeverDecreasesIt) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    auto d = dependent_data(4, 5 + rng.below(60), rng.next());
    Dag g(letters(4));
    for (int k = 0; k < 6; ++k) {
      int a = static_cast<int>(rng.below(4)), b = static_cast<int>(rng.below(4));
      double before = log_likelihood(g, d);
      if (!g.try_add_edge(a, b)) continue;
      EXPECT_GE(log_likelihood(g, d), before - 1e-9);
    }
  }
}

TEST(Bic, Examples) {
  auto d = fixture::table({"X"}, {2}, {{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}});
  EXPECT_NEAR(bic(Dag({"X"}), d), 10 * std::log(0.5) - 0.5 * std::log(10.0), 1e-12);
  EXPECT_NEAR(bic(Dag({"X"}), d), -8.0828, 5e-5);
  Variable v{"V", {"a", "b"}, {}};
  EXPECT_THROW(bic(Dag({"V"}), CategoricalDataset({v}, {{0, kMissing}})), DataError);
}

TEST(Bic, MatchesCountingOracleAndDecomposes) {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    auto d = dependent_data(5, 20 + rng.below(300), rng.next());
    Dag g(letters(5));
    for (int k = 0; k < 7; ++k)
      g.try_add_edge(static_cast<int>(rng.below(5)), static_cast<int>(rng.below(5)));
    double total = 0;
    for (int i = 0; i < 5; ++i) {
      std::vector<std::string> pa;
      for (int p : g.parents(i)) pa.push_back(g.name(p));
      total += local_bic(g.name(i), pa, d);
    }
    EXPECT_NEAR(bic(g, d), oracle::bic(g, d), 1e-8);
    EXPECT_NEAR(bic(g, d), total, 1e-8);
    EXPECT_NEAR(bic(g, d), log_likelihood(g, d) - 0.5 * free_parameters(g, d) * std::log(double(d.rows())), 1e-8);
  }
}

TEST(Bic, EmptyGraphWinsOnIndependentData) {
  auto d = fixture::uniform(letters(3), {2, 3, 2}, 20000, 5);
  const double empty = bic(Dag(letters(3)), d);
  for (const auto& m : oracle::all_dags(3)) {
    Dag g = oracle::to_dag(m, letters(3));
    if (g.edge_count() == 0) continue;
    EXPECT_LT(bic(g, d), empty);
  }
}

// Markov-equivalent DAGs must score identically on any complete dataset.
TEST(Bic, ScoreEquivalentOverEquivalenceClasses) {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto d = dependent_data(4, 150, seed);
    std::map<std::vector<char>, std::vector<double>> by_class;
    for (const auto& m : oracle::all_dags(4))
      by_class[oracle::independence_signature(m)].push_back(bic(oracle::to_dag(m, letters(4)), d));
    for (const auto& [sig, scores] : by_class)
      for (double s : scores) EXPECT_NEAR(s, scores.front(), 1e-8 * std::abs(scores.front()));
  }
}

TEST(LocalBic, Examples) {
  auto d = dependent_data(3, 400, 4);
  // Parentless: n * sum p ln p minus (r - 1)/2 ln n.
  auto t = counts(d, "A", {});
  double direct = 0;
  for (auto c : t.counts)
    if (c) direct += double(c) * std::log(double(c) / 400.0);
  direct -= 0.5 * double(t.target_cardinality - 1) * std::log(400.0);
  EXPECT_NEAR(local_bic("A", {}, d), direct, 1e-9);

  auto ind = fixture::uniform({"X", "Noise"}, {2, 3}, 5000, 8);
  EXPECT_LT(local_bic("X", {"Noise"}, ind), local_bic("X", {}, ind));

  LocalScoreCache cache;
  double first = local_bic("B", {"A", "C"}, d, &cache);
  EXPECT_EQ(cache.size(), 1u);
  EXPECT_EQ(local_bic("B", {"C", "A"}, d, &cache), first);
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_THROW(local_bic("B", {"B"}, d), DataError);
  EXPECT_THROW(local_bic("Q", {}, d), DataError);
}

TEST(LocalBic, CacheIsSafeUnderConcurrentUse) {
  auto d = dependent_data(6, 500, 12);
  auto cache = std::make_shared<LocalScoreCache>();
  auto work = [&](int offset) {
    BicScorer s(d, cache);
    double sum = 0;
    for (int rep = 0; rep < 20; ++rep)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          if (i != j) sum += s.local((i + offset) % 6, {j == (i + offset) % 6 ? (j + 1) % 6 : j});
    return sum;
  };
  auto a = std::async(std::launch::async, work, 0);
  auto b = std::async(std::launch::async, work, 0);
  double x = a.get(), y = b.get();
  EXPECT_EQ(x, y);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) {
        auto v = cache->lookup(i, {j});
        ASSERT_TRUE(v.has_value());
        EXPECT_EQ(*v, family_bic(d, i, std::vector<int>{j}));
      }
}

TEST(CiTest, Examples) {
  std::vector<std::int32_t> x, y;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 25; ++k) {
        x.push_back(a);
        y.push_back(b);
      }
  auto flat = fixture::table({"X", "Y"}, {2, 2}, {x, y});
  auto r = ci_test(flat, "X", "Y", {}, 0.05);
  EXPECT_EQ(r.statistic, 0);
  EXPECT_EQ(r.p_value, 1);
  EXPECT_TRUE(r.independent);

  std::vector<std::int32_t> bal;
  for (int i = 0; i < 1000; ++i) bal.push_back(i % 2);
  auto same = fixture::table({"X", "Y"}, {2, 2}, {bal, bal});
  auto s = ci_test(same, "X", "Y", {}, 0.05);
  EXPECT_NEAR(s.statistic, 2 * 1000 * std::log(2.0), 1e-9);
  EXPECT_NEAR(s.statistic, 1386.3, 0.05);
  EXPECT_EQ(s.dof, 1);
  EXPECT_FALSE(s.independent);

  // X and Y are functions of Z; within each Z stratum both are constant.
  std::vector<std::int32_t> z, fx, fy;
  for (int i = 0; i < 300; ++i) {
    z.push_back(i % 3);
    fx.push_back(i % 3 == 0 ? 1 : 0);
    fy.push_back(i % 3 == 2 ? 1 : 0);
  }
  auto det = fixture::table({"X", "Y", "Z"}, {2, 2, 3}, {fx, fy, z});
  auto c = ci_test(det, "X", "Y", {"Z"}, 0.05);
  EXPECT_EQ(c.statistic, 0);
  EXPECT_TRUE(c.independent);
  EXPECT_EQ(c.dof, 3);
  EXPECT_FALSE(ci_test(det, "X", "Y", {}, 0.05).independent);
}

TEST(CiTest, DegenerateVariableTestsIndependent) {
  auto d = fixture::table({"X", "Y"}, {2, 2}, {{0, 0, 0, 0}, {0, 1, 0, 1}});
  auto r = ci_test(d, "X", "Y", {}, 0.05);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.independent);
  EXPECT_EQ(r.statistic, 0);
  EXPECT_GE(r.dof, 1);
}

TEST(CiTest, RejectsMalformedQueries) {
  auto d = fixture::uniform({"X", "Y"}, {2, 2}, 10, 1);
  EXPECT_THROW(ci_test(d, "X", "X", {}, 0.05), DataError);
  EXPECT_THROW(ci_test(d, "X", "Y", {"Y"}, 0.05), DataError);
}

TEST(CiTest, StatisticMatchesMutualInformationOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto d = dependent_data(3, 30 + rng.below(400), rng.next());
    auto r = ci_test(d, "A", "C", {"B"}, 0.05);
    // 2 * sum n_xyz ln(n_xyz n_z / (n_xz n_yz)) from raw counting.
    std::map<std::tuple<int, int, int>, double> nxyz;
    std::map<std::pair<int, int>, double> nxz, nyz;
    std::map<int, double> nz;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      int x = d.at(i, 0), y = d.at(i, 2), zz = d.at(i, 1);
      nxyz[{x, y, zz}] += 1;
      nxz[{x, zz}] += 1;
      nyz[{y, zz}] += 1;
      nz[zz] += 1;
    }
    double g2 = 0;
    for (const auto& [k, c] : nxyz) {
      auto [x, y, zz] = k;
      g2 += 2 * c * std::log(c * nz[zz] / (nxz[{x, zz}] * nyz[{y, zz}]));
    }
    EXPECT_NEAR(r.statistic, std::max(0.0, g2), 1e-8);
    EXPECT_EQ(r.dof, double((d.cardinality(0) - 1) * (d.cardinality(2) - 1) * d.cardinality(1)));
  }
}

TEST(CiTest, PValueMatchesClosedFormTails) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto d2 = dependent_data(2, 40 + rng.below(200), rng.next());
    if (d2.cardinality(0) != 2 || d2.cardinality(1) != 2) continue;
    auto binary = fixture::table({"X", "Y"}, {2, 2}, {d2.columns()[0], d2.columns()[1]});
    auto r = ci_test(binary, "X", "Y", {}, 0.05);
    if (r.degenerate) continue;
    EXPECT_NEAR(r.p_value, chi2_tail(r.statistic, 1), 1e-10);
  }
  EXPECT_NEAR(chi_squared_survival(3.0, 2), chi2_tail(3.0, 2), 1e-14);
  EXPECT_NEAR(chi_squared_survival(3.841458820694124, 1), 0.05, 1e-12);
}

TEST(CiTest, SymmetricAndBounded) {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    auto d = dependent_data(4, 10 + rng.below(300), rng.next());
    std::vector<std::string> z;
    if (rng.below(2)) z.push_back("B");
    if (rng.below(2)) z.push_back("D");
    auto a = ci_test(d, "A", "C", z, 0.05), b = ci_test(d, "C", "A", z, 0.05);
    EXPECT_NEAR(a.statistic, b.statistic, 1e-9 * std::max(1.0, a.statistic));
    EXPECT_EQ(a.dof, b.dof);
    EXPECT_NEAR(a.p_value, b.p_value, 1e-12);
    EXPECT_GE(a.statistic, 0);
    EXPECT_GE(a.p_value, 0);
    EXPECT_LE(a.p_value, 1);
    EXPECT_EQ(a.independent, a.p_value > 0.05);
  }
}

TEST(CiTester, MemoisesOnCanonicalKey) {
  auto d = dependent_data(4, 200, 3);
  CiTester t(d, 0.05);
  auto first = t.test(0, 2, {3, 1});
  auto again = t.test(2, 0, {1, 3});
  EXPECT_EQ(t.tests(), 1u);
  EXPECT_EQ(first.statistic, again.statistic);
  t.test(0, 2, {1});
  EXPECT_EQ(t.tests(), 2u);
}
