#pragma once

#include <cmath>
#include <optional>
#include <unordered_map>
#include <vector>

#include "prodgraph/graph.hpp"
#include "prodgraph/types.hpp"

namespace prodgraph {

enum class PairMode {
  Unordered,  // each user pair {u, v}, u != v, counted once
  Ordered,    // both (u, v) and (v, u); exactly twice the unordered score
};

struct SwingParams {
  double alpha = 1.0;
  bool user_weighting = true;
  std::size_t top_k = 100;
  std::optional<std::size_t> max_user_degree;  // users clicking more items are dropped from U_seed
  PairMode pair_mode = PairMode::Unordered;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be a positive finite number");
    if (top_k == 0) throw ValidationError("top-k must be at least 1");
    if (max_user_degree && *max_user_degree == 0) throw ValidationError("max user degree must be at least 1");
  }
};

// Swing scores for one seed from its local neighborhood.
//
// For each pair of users u, v that both clicked the seed, let C be the items
// both clicked other than the seed. Every j in C gains
//   w_u * w_v / (alpha + |C|)
// with w = 1/sqrt(|I_u|) under user weighting and 1 otherwise.
inline NeighborList swing_scores(const LocalNeighborhood& hood, const SwingParams& params) {
  std::vector<const NeighborhoodMember*> users;
  users.reserve(hood.members.size());
  for (const auto& m : hood.members) {
    if (params.max_user_degree && m.items.size() > *params.max_user_degree) continue;
    users.push_back(&m);
  }

  std::vector<double> weight(users.size(), 1.0);
  if (params.user_weighting) {
    for (std::size_t k = 0; k < users.size(); ++k) {
      weight[k] = 1.0 / std::sqrt(static_cast<double>(users[k]->items.size()));
    }
  }

  std::unordered_map<ItemId, double> acc;
  std::vector<ItemId> common;
  auto add_pair = [&](std::size_t a, std::size_t b) {
    common.clear();
    auto x = users[a]->items;
    auto y = users[b]->items;
    auto ix = x.begin();
    auto iy = y.begin();
    while (ix != x.end() && iy != y.end()) {
      if (*ix < *iy) {
        ++ix;
      } else if (*iy < *ix) {
        ++iy;
      } else {
        if (*ix != hood.seed) common.push_back(*ix);
        ++ix;
        ++iy;
      }
    }
    if (common.empty()) return;
    const double contribution = weight[a] * weight[b] / (params.alpha + static_cast<double>(common.size()));
    for (ItemId j : common) acc[j] += contribution;
  };

  for (std::size_t a = 0; a < users.size(); ++a) {
    if (params.pair_mode == PairMode::Unordered) {
      for (std::size_t b = a + 1; b < users.size(); ++b) add_pair(a, b);
    } else {
      for (std::size_t b = 0; b < users.size(); ++b) {
        if (b != a) add_pair(a, b);
      }
    }
  }

  std::vector<Neighbor> candidates;
  candidates.reserve(acc.size());
  for (const auto& [item, score] : acc) candidates.push_back({item, score});
  return rank_neighbors(hood.seed, std::move(candidates), params.top_k);
}

inline NeighborList swing_scores(ItemId seed, const BipartiteGraph& graph, const SwingParams& params) {
  params.validate();
  if (!graph.contains(seed)) throw ValidationError("unknown seed item " + std::to_string(seed.value));
  return swing_scores(neighborhood_of(graph, seed), params);
}

// Reducer-side scorer for the parallel pipeline.
class SwingScorer {
 public:
  explicit SwingScorer(SwingParams params) : params_(params) { params_.validate(); }

  NeighborList operator()(const LocalNeighborhood& hood) const { return swing_scores(hood, params_); }

  const SwingParams& params() const { return params_; }

 private:
  SwingParams params_;
};

// Sequential full index, ascending seed.
inline std::vector<NeighborList> swing_all(const BipartiteGraph& graph, const SwingParams& params) {
  SwingScorer scorer(params);
  std::vector<NeighborList> out;
  out.reserve(graph.items().size());
  for (ItemId i : graph.items()) out.push_back(scorer(neighborhood_of(graph, i)));
  return out;
}

}  // namespace prodgraph
