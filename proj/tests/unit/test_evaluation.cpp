#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "prodgraph/evaluation.hpp"

using namespace prodgraph;

namespace {

std::vector<ItemId> ids(std::initializer_list<std::uint64_t> v) {
  std::vector<ItemId> out;
  for (auto x : v) out.push_back(ItemId{x});
  return out;
}

BehaviorEvent click(std::uint64_t u, std::uint64_t i, Timestamp t) { return {UserId{u}, ItemId{i}, Action::Click, t}; }

}  // namespace

TEST(Metrics, PrecisionAndRecall) {
  // a=0 b=1 c=2 d=3 e=4
  auto m = case_metrics(ids({0, 1, 2}), ids({1, 2, 3, 4}));
  EXPECT_EQ(m.hits, 2u);
  EXPECT_NEAR(m.precision, 2.0 / 3, 1e-15);
  EXPECT_NEAR(m.recall, 0.5, 1e-15);
}

TEST(Metrics, AllHits) {
  auto m = case_metrics(ids({1, 2, 3}), ids({3, 2, 1, 9}));
  EXPECT_EQ(m.precision, 1.0);
}

TEST(Metrics, LiteralMapAndStandardAp) {
  // predict [b, x, c], truth {b, c}
  auto m = case_metrics(ids({1, 7, 2}), ids({1, 2}));
  EXPECT_NEAR(m.map_literal, 1 + 0.5 + 2.0 / 3, 1e-15);
  EXPECT_NEAR(m.ap_standard, (1 + 2.0 / 3) / 2, 1e-15);
}

TEST(Metrics, EmptyPredictionContributesZero) {
  auto m = case_metrics({}, ids({1}));
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.map_literal, 0.0);
}

TEST(Metrics, AddingAHitNeverHurts) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ItemId> truth, predict;
    for (int k = 0; k < 6; ++k) truth.push_back(ItemId{rng() % 20});
    std::sort(truth.begin(), truth.end());
    truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
    for (int k = 0; k < 5; ++k) predict.push_back(ItemId{100 + rng() % 20});
    auto before = case_metrics(predict, truth);
    // replace a miss by an unused hit
    for (auto t : truth) {
      if (std::find(predict.begin(), predict.end(), t) != predict.end()) continue;
      auto miss = std::find_if(predict.begin(), predict.end(), [&](ItemId x) {
        return std::find(truth.begin(), truth.end(), x) == truth.end();
      });
      if (miss == predict.end()) break;
      *miss = t;
      auto after = case_metrics(predict, truth);
      EXPECT_GE(after.precision, before.precision);
      EXPECT_GE(after.recall, before.recall);
      EXPECT_GE(after.ap_standard, before.ap_standard);
      EXPECT_LE(after.map_literal, static_cast<double>(predict.size()));
      before = after;
    }
  }
}

TEST(BuildCases, Fig5SequenceHitsThree) {
  // test sequence A2..A5; index for A2 lists A3, A4, A5 among six items
  std::vector<BehaviorEvent> ev = {click(0, 2, 101), click(0, 3, 102), click(0, 4, 103), click(0, 5, 104)};
  std::vector<NeighborList> index = {
      {ItemId{2}, {{ItemId{9}, 6}, {ItemId{3}, 5}, {ItemId{8}, 4}, {ItemId{4}, 3}, {ItemId{7}, 2}, {ItemId{5}, 1}}}};
  EvalOptions o;
  o.split = 100;
  o.k = 6;
  auto cases = build_cases(ev, index, o);
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_EQ(cases[0].seed, ItemId{2});
  EXPECT_EQ(cases[0].truth, ids({3, 4, 5}));
  EXPECT_EQ(case_metrics(cases[0]).hits, 3u);
}

TEST(BuildCases, SplitAndSkipping) {
  std::vector<BehaviorEvent> ev = {
      click(0, 1, 50),  click(0, 2, 150),                    // one test event: skipped
      click(1, 1, 200), click(1, 1, 210),                    // one distinct item: skipped
      click(2, 4, 300), click(2, 5, 200), click(2, 4, 400),  // sorted to 5, 4
  };
  EvalOptions o;
  o.split = 100;
  auto cases = build_cases(ev, {}, o);
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_EQ(cases[0].user, UserId{2});
  EXPECT_EQ(cases[0].seed, ItemId{5});
  EXPECT_EQ(cases[0].truth, ids({4}));
  EXPECT_TRUE(cases[0].predict.empty());
}

TEST(BuildCases, CaseCountEqualsEligibleUsers) {
  std::mt19937_64 rng(3);
  std::vector<BehaviorEvent> ev;
  std::size_t eligible = 0;
  for (std::uint64_t u = 0; u < 100; ++u) {
    const auto n = rng() % 4;
    std::set<std::uint64_t> distinct;
    for (std::uint64_t k = 0; k < n; ++k) {
      auto item = rng() % 5;
      distinct.insert(item);
      ev.push_back(click(u, item, 1000 + static_cast<Timestamp>(rng() % 100)));
    }
    eligible += distinct.size() >= 2;
  }
  EvalOptions o;
  o.split = 999;
  EXPECT_EQ(build_cases(ev, {}, o).size(), eligible);
}

TEST(BuildCases, RandomSeedIsDeterministicAndLeavesTruth) {
  std::vector<BehaviorEvent> ev;
  for (std::uint64_t u = 0; u < 50; ++u) {
    for (std::uint64_t k = 0; k < 6; ++k) ev.push_back(click(u, (u + k) % 17, 10 + static_cast<Timestamp>(k)));
  }
  EvalOptions o;
  o.selection = SeedSelection::Random;
  o.rng_seed = 4;
  auto a = build_cases(ev, {}, o);
  auto b = build_cases(ev, {}, o);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].seed, b[k].seed);
    EXPECT_FALSE(a[k].truth.empty());
  }
}

TEST(BuildCases, PredictCutAtK) {
  std::vector<BehaviorEvent> ev = {click(0, 0, 1), click(0, 1, 2)};
  std::vector<NeighborList> index = {{ItemId{0}, {{ItemId{1}, 3}, {ItemId{2}, 2}, {ItemId{3}, 1}}}};
  EvalOptions o;
  o.k = 2;
  EXPECT_EQ(build_cases(ev, index, o)[0].predict, ids({1, 2}));
  o.k = 50;  // longer than the list: precision uses the realized length
  auto c = build_cases(ev, index, o);
  EXPECT_NEAR(case_metrics(c[0]).precision, 1.0 / 3, 1e-15);
  o.k = 0;
  EXPECT_THROW(build_cases(ev, index, o), ValidationError);
}

TEST(Score, ThreeCaseHandFixture) {
  std::vector<EvalCase> cases(3);
  cases[0].predict = ids({1, 2, 3});
  cases[0].truth = ids({2, 3, 4, 5});
  cases[1].predict = ids({6, 7});
  cases[1].truth = ids({6});
  cases[2].predict = ids({8, 9, 10});
  cases[2].truth = ids({11});
  auto r = score(cases);
  EXPECT_EQ(r.case_count, 3u);
  EXPECT_NEAR(r.precision, (2.0 / 3 + 0.5 + 0) / 3, 1e-12);
  EXPECT_NEAR(r.recall, (0.5 + 1 + 0) / 3, 1e-12);
  EXPECT_NEAR(r.map_literal, ((0 + 0.5 + 2.0 / 3) + (1 + 0.5) + 0) / 3, 1e-12);
  EXPECT_THROW(score(std::vector<EvalCase>{}), ValidationError);
}

TEST(Score, ByDayGroupsOnSeedTime) {
  std::vector<EvalCase> cases(3);
  cases[0].seed_time = 10;
  cases[1].seed_time = 86400 + 5;
  cases[2].seed_time = 20;
  for (auto& c : cases) {
    c.predict = ids({1});
    c.truth = ids({1});
  }
  auto days = score_by_day(cases);
  ASSERT_EQ(days.size(), 2u);
  EXPECT_EQ(days[0].day, 0);
  EXPECT_EQ(days[0].metrics.case_count, 2u);
  EXPECT_EQ(days[1].day, 1);
}

TEST(OnlineRatios, PlainRatiosAndUndefined) {
  auto r = online_ratios(1000, 50, 5, 200.0);
  EXPECT_NEAR(*r.ctr, 0.05, 1e-15);
  EXPECT_NEAR(*r.cvr, 0.1, 1e-15);
  EXPECT_NEAR(*r.ppm, 200.0, 1e-12);
  auto d = online_ratios(2000, 100, 10, 400.0);
  EXPECT_NEAR(*d.ctr, *r.ctr, 1e-15);
  EXPECT_NEAR(*d.cvr, *r.cvr, 1e-15);
  EXPECT_NEAR(*d.ppm, *r.ppm, 1e-12);
  auto z = online_ratios(1000, 0, 0, 0.0);
  EXPECT_FALSE(z.cvr.has_value());
  EXPECT_TRUE(z.ctr.has_value());
  EXPECT_FALSE(online_ratios(0, 0, 0, 0).ctr.has_value());
}
