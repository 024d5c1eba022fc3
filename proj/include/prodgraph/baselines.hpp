#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prodgraph/graph.hpp"
#include "prodgraph/ingest.hpp"
#include "prodgraph/types.hpp"

namespace prodgraph {

// Neighborhood baselines: binary cosine, Jaccard, Pearson over explicit
// ratings, and the user-weighted cosine used as the CF control.

namespace detail {

inline void require_item(const BipartiteGraph& g, ItemId i) {
  if (!g.contains(i)) throw ValidationError("unknown item " + std::to_string(i.value));
}

inline double user_weight_sq(std::size_t degree) { return 1.0 / static_cast<double>(degree); }

}  // namespace detail

inline double cosine_sim(ItemId i, ItemId j, const BipartiteGraph& g) {
  detail::require_item(g, i);
  detail::require_item(g, j);
  auto ui = g.users_of(i);
  auto uj = g.users_of(j);
  auto common = intersection_size(ui, uj);
  if (common == 0) return 0.0;
  // sqrt of the exact integer product, so mathematically equal scores tie exactly
  return static_cast<double>(common) / std::sqrt(static_cast<double>(ui.size() * uj.size()));
}

inline double jaccard_sim(ItemId i, ItemId j, const BipartiteGraph& g) {
  detail::require_item(g, i);
  detail::require_item(g, j);
  auto ui = g.users_of(i);
  auto uj = g.users_of(j);
  auto common = intersection_size(ui, uj);
  return static_cast<double>(common) / static_cast<double>(ui.size() + uj.size() - common);
}

// sum_{u in Ui^Uj} w_u^2 / sqrt(sum_{u in Ui} w_u^2 * sum_{v in Uj} w_v^2),
// with w_u = 1/sqrt(|I_u|).
inline double weighted_cf_sim(ItemId i, ItemId j, const BipartiteGraph& g) {
  detail::require_item(g, i);
  detail::require_item(g, j);
  auto norm = [&g](ItemId x) {
    double s = 0.0;
    for (UserId u : g.users_of(x)) s += detail::user_weight_sq(g.user_degree(u));
    return s;
  };
  auto ui = g.users_of(i);
  auto uj = g.users_of(j);
  double num = 0.0;
  auto a = ui.begin();
  auto b = uj.begin();
  while (a != ui.end() && b != uj.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      num += detail::user_weight_sq(g.user_degree(*a));
      ++a;
      ++b;
    }
  }
  if (num == 0.0) return 0.0;
  return num / std::sqrt(norm(i) * norm(j));
}

struct UserRating {
  UserId user;
  double value = 0.0;
};

// Explicit ratings r_{u,i} with per-item means.
class RatingsView {
 public:
  RatingsView() = default;

  explicit RatingsView(std::span<const Rating> ratings) {
    std::uint64_t bound = 0;
    for (const auto& r : ratings) bound = std::max(bound, r.item.value + 1);
    by_item_.resize(bound);
    for (const auto& r : ratings) by_item_[r.item.value].push_back({r.user, r.value});
    means_.assign(bound, 0.0);
    for (std::size_t i = 0; i < bound; ++i) {
      auto& list = by_item_[i];
      std::sort(list.begin(), list.end(), [](const UserRating& a, const UserRating& b) { return a.user < b.user; });
      for (std::size_t k = 1; k < list.size(); ++k) {
        if (list[k].user == list[k - 1].user) {
          throw ValidationError("duplicate rating for user " + std::to_string(list[k].user.value) + " on item " +
                                std::to_string(i));
        }
      }
      double sum = 0.0;
      for (const auto& r : list) sum += r.value;
      if (!list.empty()) means_[i] = sum / static_cast<double>(list.size());
    }
    for (const auto& r : ratings) events_.push_back({r.user, r.item, Action::Click, 0});
  }

  bool contains(ItemId i) const { return i.value < by_item_.size() && !by_item_[i.value].empty(); }

  std::span<const UserRating> ratings_of(ItemId i) const {
    if (i.value >= by_item_.size()) return {};
    return by_item_[i.value];
  }

  // Arithmetic mean of all stored ratings for the item.
  double item_mean(ItemId i) const { return i.value < means_.size() ? means_[i.value] : 0.0; }

  // Rated (user, item) pairs as click events, for building the candidate graph.
  std::span<const BehaviorEvent> as_events() const { return events_; }

 private:
  std::vector<std::vector<UserRating>> by_item_;
  std::vector<double> means_;
  std::vector<BehaviorEvent> events_;
};

struct PearsonResult {
  double value = 0.0;
  bool degenerate = false;  // fewer than 2 co-raters or zero variance
};

// Pearson correlation over co-raters, centred on each item's overall mean.
inline PearsonResult pearson_sim(ItemId i, ItemId j, const RatingsView& ratings) {
  if (!ratings.contains(i)) throw ValidationError("unknown item " + std::to_string(i.value));
  if (!ratings.contains(j)) throw ValidationError("unknown item " + std::to_string(j.value));
  auto ri = ratings.ratings_of(i);
  auto rj = ratings.ratings_of(j);
  const double mi = ratings.item_mean(i);
  const double mj = ratings.item_mean(j);
  double cov = 0.0, vi = 0.0, vj = 0.0;
  std::size_t n = 0;
  auto a = ri.begin();
  auto b = rj.begin();
  while (a != ri.end() && b != rj.end()) {
    if (a->user < b->user) {
      ++a;
    } else if (b->user < a->user) {
      ++b;
    } else {
      const double di = a->value - mi;
      const double dj = b->value - mj;
      cov += di * dj;
      vi += di * di;
      vj += dj * dj;
      ++n;
      ++a;
      ++b;
    }
  }
  if (n < 2 || vi == 0.0 || vj == 0.0) return {0.0, true};
  return {std::clamp(cov / (std::sqrt(vi) * std::sqrt(vj)), -1.0, 1.0), false};
}

enum class Measure { Cosine, Jaccard, Pearson, WeightedCf };

inline std::optional<Measure> parse_measure(std::string_view s) {
  if (s == "cosine") return Measure::Cosine;
  if (s == "jaccard") return Measure::Jaccard;
  if (s == "pearson") return Measure::Pearson;
  if (s == "weighted-cf") return Measure::WeightedCf;
  return std::nullopt;
}

inline const char* to_string(Measure m) {
  switch (m) {
    case Measure::Cosine: return "cosine";
    case Measure::Jaccard: return "jaccard";
    case Measure::Pearson: return "pearson";
    case Measure::WeightedCf: return "weighted-cf";
  }
  return "?";
}

// Batch scorer over one seed neighborhood. Candidates are items co-clicked
// with the seed by at least one user; item degrees and weighted norms are
// read from the global graph as side inputs.
//
// Pearson lists keep only positive correlations, since neighbor scores are
// non-negative.
class BaselineScorer {
 public:
  BaselineScorer(Measure measure, const BipartiteGraph& graph, std::size_t k, const RatingsView* ratings = nullptr)
      : measure_(measure), graph_(&graph), k_(k), ratings_(ratings) {
    if (k == 0) throw ValidationError("top-k must be at least 1");
    if (measure == Measure::Pearson && ratings == nullptr) {
      throw ValidationError("pearson similarity needs explicit ratings");
    }
    if (measure == Measure::WeightedCf) {
      item_norm_.assign(graph.item_id_bound(), 0.0);
      for (ItemId i : graph.items()) {
        double s = 0.0;
        for (UserId u : graph.users_of(i)) s += detail::user_weight_sq(graph.user_degree(u));
        item_norm_[i.value] = s;
      }
    }
  }

  NeighborList operator()(const LocalNeighborhood& hood) const {
    struct Acc {
      std::size_t common = 0;
      double weighted = 0.0;
    };
    std::unordered_map<ItemId, Acc> acc;
    double seed_norm = 0.0;
    for (const auto& m : hood.members) {
      const double w2 = detail::user_weight_sq(m.items.size());
      seed_norm += w2;
      for (ItemId j : m.items) {
        if (j == hood.seed) continue;
        auto& a = acc[j];
        a.common += 1;
        a.weighted += w2;
      }
    }

    const double seed_degree = static_cast<double>(hood.members.size());
    std::vector<Neighbor> candidates;
    candidates.reserve(acc.size());
    for (const auto& [j, a] : acc) {
      const double dj = static_cast<double>(graph_->item_degree(j));
      const double c = static_cast<double>(a.common);
      double score = 0.0;
      switch (measure_) {
        case Measure::Cosine: score = c / std::sqrt(seed_degree * dj); break;
        case Measure::Jaccard: score = c / (seed_degree + dj - c); break;
        case Measure::WeightedCf: score = a.weighted / std::sqrt(seed_norm * item_norm_[j.value]); break;
        case Measure::Pearson: score = pearson_sim(hood.seed, j, *ratings_).value; break;
      }
      candidates.push_back({j, score});
    }
    return rank_neighbors(hood.seed, std::move(candidates), k_);
  }

 private:
  Measure measure_;
  const BipartiteGraph* graph_;
  std::size_t k_;
  const RatingsView* ratings_;
  std::vector<double> item_norm_;
};

// Sequential batch driver: one list per item in the graph, ascending seed.
inline std::vector<NeighborList> top_k_baseline(const BipartiteGraph& graph, Measure measure, std::size_t k,
                                                const RatingsView* ratings = nullptr) {
  BaselineScorer scorer(measure, graph, k, ratings);
  std::vector<NeighborList> out;
  out.reserve(graph.items().size());
  for (ItemId i : graph.items()) out.push_back(scorer(neighborhood_of(graph, i)));
  return out;
}

}  // namespace prodgraph
