#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "prodgraph/label_propagation.hpp"
#include "prodgraph/types.hpp"

namespace prodgraph {

// Hit-based offline evaluation: does the index, queried with a seed taken
// from a user's future behavior, predict what that user did next?

enum class SeedSelection {
  First,   // first distinct item of the test sequence
  Random,  // uniform over positions that still have a successor
};

struct EvalOptions {
  Timestamp split = 0;  // test events have timestamp > split
  std::size_t k = 10;
  SeedSelection selection = SeedSelection::First;
  std::uint64_t rng_seed = 0;
  std::optional<Action> action;  // restrict the test sequence to one action
};

struct EvalCase {
  UserId user;
  ItemId seed;
  Timestamp seed_time = 0;
  std::vector<ItemId> truth;    // distinct items after the seed, in order
  std::vector<ItemId> predict;  // index list for the seed, cut at k
};

struct CaseMetrics {
  std::size_t hits = 0;
  double precision = 0.0;
  double recall = 0.0;
  double map_literal = 0.0;  // sum_{k=1..m} precision@k
  double ap_standard = 0.0;  // precision@k at relevant ranks / min(m, |truth|)
};

struct MetricReport {
  double precision = 0.0;
  double recall = 0.0;
  double map_literal = 0.0;
  double ap_standard = 0.0;
  std::size_t case_count = 0;
};

// One case per user with at least two distinct test items.
inline std::vector<EvalCase> build_cases(std::span<const BehaviorEvent> events, std::span<const NeighborList> index,
                                         const EvalOptions& opts) {
  if (opts.k == 0) throw ValidationError("k must be at least 1");
  std::unordered_map<ItemId, const NeighborList*> lookup;
  for (const auto& list : index) lookup[list.seed] = &list;

  std::map<UserId, std::vector<const BehaviorEvent*>> sequences;
  for (const auto& e : events) {
    if (e.timestamp <= opts.split) continue;
    if (opts.action && e.action != *opts.action) continue;
    sequences[e.user].push_back(&e);
  }

  UnitRandom rng(opts.rng_seed);
  std::vector<EvalCase> cases;
  for (auto& [user, seq] : sequences) {
    std::stable_sort(seq.begin(), seq.end(),
                     [](const BehaviorEvent* a, const BehaviorEvent* b) { return a->timestamp < b->timestamp; });
    std::vector<const BehaviorEvent*> distinct;
    std::unordered_set<ItemId> seen;
    for (const auto* e : seq) {
      if (seen.insert(e->item).second) distinct.push_back(e);
    }
    if (distinct.size() < 2) continue;

    std::size_t pos = 0;
    if (opts.selection == SeedSelection::Random) {
      pos = static_cast<std::size_t>(rng() * static_cast<double>(distinct.size() - 1));
    }

    EvalCase c{user, distinct[pos]->item, distinct[pos]->timestamp, {}, {}};
    for (std::size_t k = pos + 1; k < distinct.size(); ++k) c.truth.push_back(distinct[k]->item);
    if (auto it = lookup.find(c.seed); it != lookup.end()) {
      for (const auto& n : it->second->entries) {
        if (c.predict.size() == opts.k) break;
        c.predict.push_back(n.item);
      }
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

inline CaseMetrics case_metrics(std::span<const ItemId> predict, std::span<const ItemId> truth) {
  CaseMetrics m;
  std::unordered_set<ItemId> relevant(truth.begin(), truth.end());
  std::size_t running = 0;
  double ap_sum = 0.0;
  for (std::size_t k = 0; k < predict.size(); ++k) {
    const bool hit = relevant.count(predict[k]) > 0;
    if (hit) ++running;
    const double at_k = static_cast<double>(running) / static_cast<double>(k + 1);
    m.map_literal += at_k;
    if (hit) ap_sum += at_k;
  }
  m.hits = running;
  if (!predict.empty()) m.precision = static_cast<double>(running) / static_cast<double>(predict.size());
  if (!relevant.empty()) m.recall = static_cast<double>(running) / static_cast<double>(relevant.size());
  const std::size_t norm = std::min(predict.size(), relevant.size());
  if (norm > 0) m.ap_standard = ap_sum / static_cast<double>(norm);
  return m;
}

inline CaseMetrics case_metrics(const EvalCase& c) { return case_metrics(c.predict, c.truth); }

inline MetricReport score(std::span<const EvalCase> cases) {
  if (cases.empty()) throw ValidationError("no evaluation cases");
  MetricReport r;
  for (const auto& c : cases) {
    auto m = case_metrics(c);
    r.precision += m.precision;
    r.recall += m.recall;
    r.map_literal += m.map_literal;
    r.ap_standard += m.ap_standard;
  }
  const double n = static_cast<double>(cases.size());
  r.precision /= n;
  r.recall /= n;
  r.map_literal /= n;
  r.ap_standard /= n;
  r.case_count = cases.size();
  return r;
}

struct DailyReport {
  std::int64_t day = 0;  // seed_time / day_seconds
  MetricReport metrics;
};

// Metrics grouped by the day of each case's seed, ascending.
inline std::vector<DailyReport> score_by_day(std::span<const EvalCase> cases, std::int64_t day_seconds = 86400) {
  std::map<std::int64_t, std::vector<EvalCase>> days;
  for (const auto& c : cases) days[c.seed_time / day_seconds].push_back(c);
  std::vector<DailyReport> out;
  for (const auto& [day, group] : days) out.push_back({day, score(group)});
  return out;
}

// Undefined ratios (zero denominator) are empty.
struct OnlineRatios {
  std::optional<double> ctr;
  std::optional<double> cvr;
  std::optional<double> ppm;
};

inline OnlineRatios online_ratios(std::uint64_t show_pv, std::uint64_t item_click, std::uint64_t item_trade,
                                  double payment) {
  OnlineRatios r;
  if (show_pv > 0) {
    r.ctr = static_cast<double>(item_click) / static_cast<double>(show_pv);
    r.ppm = payment / static_cast<double>(show_pv) * 1000.0;
  }
  if (item_click > 0) r.cvr = static_cast<double>(item_trade) / static_cast<double>(item_click);
  return r;
}

}  // namespace prodgraph
