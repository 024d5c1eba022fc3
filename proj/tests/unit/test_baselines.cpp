#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "prodgraph/baselines.hpp"

using namespace prodgraph;

namespace {

BipartiteGraph graph_of(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> edges) {
  std::vector<BehaviorEvent> ev;
  for (auto [u, i] : edges) ev.push_back({UserId{u}, ItemId{i}, Action::Click, 0});
  return BipartiteGraph::from_events(ev, Action::Click);
}

}  // namespace

TEST(Cosine, IdenticalAndDisjoint) {
  auto g = graph_of({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 2}});
  EXPECT_DOUBLE_EQ(cosine_sim(ItemId{0}, ItemId{1}, g), 1.0);
  EXPECT_DOUBLE_EQ(cosine_sim(ItemId{0}, ItemId{2}, g), 0.0);
  EXPECT_THROW(cosine_sim(ItemId{0}, ItemId{9}, g), ValidationError);
}

TEST(Cosine, PaddedFixtureRanksTZPQ) {
  auto c = fixtures::cosine_padded();
  auto g = BipartiteGraph::from_events(c.events, Action::Click);
  EXPECT_EQ(g.item_degree(c.item("h")), 5u);
  EXPECT_EQ(g.item_degree(c.item("t")), 15u);
  EXPECT_EQ(g.item_degree(c.item("p")), 40u);
  EXPECT_EQ(g.item_degree(c.item("q")), 60u);
  EXPECT_EQ(g.item_degree(c.item("z")), 4u);
  auto list = BaselineScorer(Measure::Cosine, g, 10)(neighborhood_of(g, c.item("h")));
  ASSERT_EQ(list.entries.size(), 4u);
  EXPECT_EQ(c.name(list.entries[0].item), "t");
  EXPECT_EQ(c.name(list.entries[1].item), "z");
  EXPECT_EQ(c.name(list.entries[2].item), "p");
  EXPECT_EQ(c.name(list.entries[3].item), "q");
  EXPECT_NEAR(list.entries[0].score, 2.0 / std::sqrt(75.0), 1e-15);
}

TEST(Jaccard, HandCases) {
  auto g = graph_of({{0, 0}, {1, 0}, {1, 1}, {2, 1}, {3, 2}});
  EXPECT_DOUBLE_EQ(jaccard_sim(ItemId{0}, ItemId{1}, g), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(jaccard_sim(ItemId{0}, ItemId{0}, g), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_sim(ItemId{0}, ItemId{2}, g), 0.0);
}

TEST(WeightedCf, HandFixture) {
  // U_i={A,B}, U_j={A,C}; |I_A|=4, |I_B|=|I_C|=1
  auto g = graph_of({{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}, {2, 1}});
  EXPECT_NEAR(weighted_cf_sim(ItemId{0}, ItemId{1}, g), 0.2, 1e-15);
  auto single = graph_of({{0, 0}, {0, 1}});
  EXPECT_NEAR(weighted_cf_sim(ItemId{0}, ItemId{1}, single), 1.0, 1e-15);
}

TEST(WeightedCf, EqualDegreeReducesToCosine) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto ev = fixtures::equal_degree_clicks(40, 25, 4, seed);
    auto g = BipartiteGraph::from_events(ev, Action::Click);
    for (auto i : g.items()) {
      for (auto j : g.items()) EXPECT_NEAR(weighted_cf_sim(i, j, g), cosine_sim(i, j, g), 1e-12);
    }
  }
}

TEST(Baselines, SymmetryAndRange) {
  auto ev = fixtures::random_clicks(40, 20, 10, 21);
  auto g = BipartiteGraph::from_events(ev, Action::Click);
  for (auto i : g.items()) {
    for (auto j : g.items()) {
      for (auto f : {cosine_sim, jaccard_sim, weighted_cf_sim}) {
        const double a = f(i, j, g);
        EXPECT_EQ(a, f(j, i, g));
        EXPECT_GE(a, 0.0);
        EXPECT_LE(a, 1.0 + 1e-12);
      }
    }
  }
}

TEST(Baselines, BatchMatchesPairwise) {
  auto ev = fixtures::random_clicks(40, 25, 8, 4);
  auto g = BipartiteGraph::from_events(ev, Action::Click);
  const std::pair<Measure, double (*)(ItemId, ItemId, const BipartiteGraph&)> cases[] = {
      {Measure::Cosine, cosine_sim}, {Measure::Jaccard, jaccard_sim}, {Measure::WeightedCf, weighted_cf_sim}};
  for (auto [m, f] : cases) {
    auto index = top_k_baseline(g, m, kUnbounded);
    ASSERT_EQ(index.size(), g.items().size());
    for (const auto& list : index) {
      std::size_t positive = 0;
      for (auto j : g.items()) {
        if (j != list.seed && f(list.seed, j, g) > 0) ++positive;
      }
      EXPECT_EQ(list.entries.size(), positive);
      for (const auto& n : list.entries) EXPECT_NEAR(n.score, f(list.seed, n.item, g), 1e-12);
      for (std::size_t k = 1; k < list.entries.size(); ++k) {
        EXPECT_GE(list.entries[k - 1].score, list.entries[k].score);
      }
    }
  }
}

TEST(Pearson, PerfectRelations) {
  std::vector<Rating> r = {{UserId{0}, ItemId{0}, 1}, {UserId{1}, ItemId{0}, 2}, {UserId{2}, ItemId{0}, 3},
                           {UserId{0}, ItemId{1}, 2}, {UserId{1}, ItemId{1}, 4}, {UserId{2}, ItemId{1}, 6},
                           {UserId{0}, ItemId{2}, 3}, {UserId{1}, ItemId{2}, 2}, {UserId{2}, ItemId{2}, 1}};
  RatingsView view(r);
  EXPECT_NEAR(pearson_sim(ItemId{0}, ItemId{1}, view).value, 1.0, 1e-12);
  EXPECT_NEAR(pearson_sim(ItemId{0}, ItemId{2}, view).value, -1.0, 1e-12);
  EXPECT_DOUBLE_EQ(view.item_mean(ItemId{1}), 4.0);
}

TEST(Pearson, DegenerateFlag) {
  std::vector<Rating> r = {{UserId{0}, ItemId{0}, 3}, {UserId{1}, ItemId{0}, 3},
                           {UserId{0}, ItemId{1}, 1}, {UserId{1}, ItemId{1}, 5}};
  RatingsView view(r);
  auto p = pearson_sim(ItemId{0}, ItemId{1}, view);
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.value, 0.0);
  std::vector<Rating> dup = {{UserId{0}, ItemId{0}, 3}, {UserId{0}, ItemId{0}, 4}};
  EXPECT_THROW(RatingsView{dup}, ValidationError);
}

TEST(Pearson, RandomTableMatchesTextbook) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rating(1.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rating> r;
    std::vector<double> x, y;
    for (std::uint64_t u = 0; u < 5; ++u) {
      x.push_back(rating(rng));
      y.push_back(rating(rng));
      r.push_back({UserId{u}, ItemId{0}, x.back()});
      r.push_back({UserId{u}, ItemId{1}, y.back()});
    }
    RatingsView view(r);
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / 5;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / 5;
    EXPECT_NEAR(pearson_sim(ItemId{0}, ItemId{1}, view).value, oracle::pearson(x, y, mx, my), 1e-12);
  }
}

TEST(Baselines, MeasureNames) {
  for (auto m : {Measure::Cosine, Measure::Jaccard, Measure::Pearson, Measure::WeightedCf}) {
    EXPECT_EQ(parse_measure(to_string(m)), m);
  }
  EXPECT_FALSE(parse_measure("euclid"));
  auto g = graph_of({{0, 0}});
  EXPECT_THROW(BaselineScorer(Measure::Pearson, g, 5), ValidationError);
}
