#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

#include "prodgraph/catalog.hpp"
#include "prodgraph/graph.hpp"
#include "prodgraph/label_propagation.hpp"
#include "prodgraph/types.hpp"

namespace prodgraph {

// Complementary relationships from ordered co-purchases: category relevance
// with max-relative-drop selection, time-decayed item relevance, cluster-level
// backoff, and a linear blend of the two relevance scores.

enum class Normalization {
  Product,      // |U_i| * |U_j|
  SqrtProduct,  // sqrt(|U_i| * |U_j|)
};

struct SurpriseParams {
  double omega = 0.8;
  std::size_t gamma = 1;        // item-level candidates need Co(i, j) > gamma
  double time_unit = 86400.0;   // seconds per decay unit
  std::size_t top_k = 100;
  Normalization normalization = Normalization::Product;

  void validate() const {
    if (!(omega >= 0.0 && omega <= 1.0)) throw ValidationError("omega must lie in [0, 1]");
    if (!(time_unit > 0.0) || !std::isfinite(time_unit)) throw ValidationError("time unit must be positive");
    if (top_k == 0) throw ValidationError("top-k must be at least 1");
  }

  double denominator(std::size_t users_i, std::size_t users_j) const {
    const double p = static_cast<double>(users_i) * static_cast<double>(users_j);
    return normalization == Normalization::Product ? p : std::sqrt(p);
  }
};

struct CategoryScore {
  CategoryId category;
  double theta = 0.0;
};

// Categories ranked before the largest relative drop
//   eta_k = (theta_{k+1} - theta_k) / theta_k
// of a descending relevance row. Non-positive entries are ignored; a row with
// no drop at all is returned whole.
inline std::vector<CategoryId> select_top_categories(std::span<const CategoryScore> row) {
  std::vector<CategoryId> positive;
  std::vector<double> theta;
  for (const auto& c : row) {
    if (c.theta > 0.0) {
      positive.push_back(c.category);
      theta.push_back(c.theta);
    }
  }
  for (std::size_t k = 1; k < theta.size(); ++k) {
    if (theta[k] > theta[k - 1]) throw ValidationError("category relevance row is not sorted descending");
  }
  if (positive.size() <= 1) return positive;

  std::size_t cut = positive.size();
  double largest = 0.0;
  for (std::size_t k = 0; k + 1 < theta.size(); ++k) {
    const double drop = std::abs((theta[k + 1] - theta[k]) / theta[k]);
    if (drop > largest) {
      largest = drop;
      cut = k + 1;
    }
  }
  positive.resize(cut);
  return positive;
}

// theta(c_i, c_j) = N(c_i -> c_j) / N(c_j), where N(c_i -> c_j) counts users
// who bought something in c_j at or after something in c_i (once per user) and
// N(c_j) is the catalog purchase counter. Only c_i != c_j pairs are scored.
class CategoryRelevance {
 public:
  CategoryRelevance() = default;

  CategoryRelevance(const BipartiteGraph& purchases, const Catalog& catalog) {
    const std::size_t n = catalog.category_id_bound();
    ordered_users_.assign(n * n, 0);
    n_ = n;

    struct Span {
      Timestamp first;
      Timestamp last;
    };
    std::unordered_map<CategoryId, Span> per_user;
    std::vector<std::pair<CategoryId, Span>> cats;
    for (UserId u : purchases.users()) {
      per_user.clear();
      auto items = purchases.items_of(u);
      auto times = purchases.item_times_of(u);
      for (std::size_t k = 0; k < items.size(); ++k) {
        CategoryId c = catalog.require_category(items[k]);
        auto [it, fresh] = per_user.try_emplace(c, Span{times[k], times[k]});
        if (!fresh) {
          it->second.first = std::min(it->second.first, times[k]);
          it->second.last = std::max(it->second.last, times[k]);
        }
      }
      cats.assign(per_user.begin(), per_user.end());
      for (const auto& [ci, si] : cats) {
        for (const auto& [cj, sj] : cats) {
          if (ci != cj && si.first <= sj.last) ++ordered_users_[ci.value * n + cj.value];
        }
      }
    }

    rows_.resize(n);
    related_.resize(n);
    related_sorted_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto count = ordered_users_[i * n + j];
        const auto total = catalog.purchase_count(CategoryId{j});
        if (count == 0 || total == 0) continue;
        rows_[i].push_back({CategoryId{j}, static_cast<double>(count) / static_cast<double>(total)});
      }
      std::sort(rows_[i].begin(), rows_[i].end(), [](const CategoryScore& a, const CategoryScore& b) {
        if (a.theta != b.theta) return a.theta > b.theta;
        return a.category < b.category;
      });
      related_[i] = select_top_categories(rows_[i]);
      related_sorted_[i] = related_[i];
      std::sort(related_sorted_[i].begin(), related_sorted_[i].end());
    }
  }

  double theta(CategoryId ci, CategoryId cj) const {
    if (ci.value >= n_) return 0.0;
    for (const auto& c : rows_[ci.value]) {
      if (c.category == cj) return c.theta;
    }
    return 0.0;
  }

  // N(c_i -> c_j).
  std::size_t ordered_users(CategoryId ci, CategoryId cj) const {
    if (ci.value >= n_ || cj.value >= n_) return 0;
    return ordered_users_[ci.value * n_ + cj.value];
  }

  // Non-zero theta entries of c_i, descending.
  std::span<const CategoryScore> row(CategoryId ci) const {
    if (ci.value >= n_) return {};
    return rows_[ci.value];
  }

  // Gamma(c_i), descending theta.
  std::span<const CategoryId> related(CategoryId ci) const {
    if (ci.value >= n_) return {};
    return related_[ci.value];
  }

  bool is_related(CategoryId ci, CategoryId cj) const {
    if (ci.value >= n_) return false;
    const auto& s = related_sorted_[ci.value];
    return std::binary_search(s.begin(), s.end(), cj);
  }

  std::size_t category_count() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> ordered_users_;
  std::vector<std::vector<CategoryScore>> rows_;
  std::vector<std::vector<CategoryId>> related_;
  std::vector<std::vector<CategoryId>> related_sorted_;
};

struct DecayedCooccurrence {
  std::size_t count = 0;  // Co(i, j): users with t_uj >= t_ui
  double decay = 0.0;     // sum of 1 / (1 + |t_ui - t_uj| / unit) over those users
};

// Walks two user-sorted adjacency lists with their edge times.
inline DecayedCooccurrence decayed_cooccurrence(std::span<const UserId> users_i, std::span<const Timestamp> times_i,
                                                std::span<const UserId> users_j, std::span<const Timestamp> times_j,
                                                double time_unit) {
  DecayedCooccurrence out;
  std::size_t a = 0, b = 0;
  while (a < users_i.size() && b < users_j.size()) {
    if (users_i[a] < users_j[b]) {
      ++a;
    } else if (users_j[b] < users_i[a]) {
      ++b;
    } else {
      if (times_j[b] >= times_i[a]) {
        ++out.count;
        out.decay += 1.0 / (1.0 + static_cast<double>(times_j[b] - times_i[a]) / time_unit);
      }
      ++a;
      ++b;
    }
  }
  return out;
}

// Purchase graph over cluster labels: a user's edge to a cluster carries the
// earliest purchase time among the cluster's members.
inline BipartiteGraph cluster_purchase_graph(const BipartiteGraph& purchases, const ClusterAssignment& clusters) {
  std::vector<BehaviorEvent> rewritten;
  rewritten.reserve(purchases.edge_count());
  for (const auto& e : purchases.edges()) {
    rewritten.push_back({e.user, clusters.label_or_self(e.item), Action::Purchase, e.timestamp});
  }
  if (rewritten.empty()) return {};
  return BipartiteGraph::from_events(rewritten, Action::Purchase);
}

// Item-level relevance s1(i, j). Zero unless c_j is in Gamma(c_i) and
// Co(i, j) > gamma.
inline double item_relevance(ItemId i, ItemId j, const BipartiteGraph& purchases, const Catalog& catalog,
                             const CategoryRelevance& relevance, const SurpriseParams& params) {
  if (!purchases.contains(i)) throw ValidationError("unknown item " + std::to_string(i.value));
  if (!purchases.contains(j)) throw ValidationError("unknown item " + std::to_string(j.value));
  if (!relevance.is_related(catalog.require_category(i), catalog.require_category(j))) return 0.0;
  auto co = decayed_cooccurrence(purchases.users_of(i), purchases.user_times_of(i), purchases.users_of(j),
                                 purchases.user_times_of(j), params.time_unit);
  if (co.count <= params.gamma) return 0.0;
  return co.decay / params.denominator(purchases.item_degree(i), purchases.item_degree(j));
}

// Cluster-level relevance s2(i, j) = s1 over clusters L(i), L(j). The category
// filter uses the original items; gamma does not apply.
inline double cluster_relevance(ItemId i, ItemId j, const BipartiteGraph& cluster_graph,
                                const ClusterAssignment& clusters, const Catalog& catalog,
                                const CategoryRelevance& relevance, const SurpriseParams& params) {
  if (!relevance.is_related(catalog.require_category(i), catalog.require_category(j))) return 0.0;
  const ClusterLabel a = clusters.label_or_self(i);
  const ClusterLabel b = clusters.label_or_self(j);
  if (!cluster_graph.contains(a) || !cluster_graph.contains(b)) {
    throw ValidationError("item without purchases passed to cluster relevance");
  }
  auto co = decayed_cooccurrence(cluster_graph.users_of(a), cluster_graph.user_times_of(a), cluster_graph.users_of(b),
                                 cluster_graph.user_times_of(b), params.time_unit);
  return co.decay / params.denominator(cluster_graph.item_degree(a), cluster_graph.item_degree(b));
}

inline double surprise_score(double s1, double s2, double omega) { return omega * s1 + (1.0 - omega) * s2; }

struct SurpriseEntry {
  ItemId item;
  double score = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  bool operator==(const SurpriseEntry&) const = default;
};

struct SurpriseList {
  ItemId seed;
  std::vector<SurpriseEntry> entries;

  bool operator==(const SurpriseList&) const = default;
};

// Reducer-side scorer. Candidates for seed i are items j != i that some user
// bought at or after i, with c_j in Gamma(c_i). Lists are directional.
//
// Without a cluster map every item is its own cluster.
class SurpriseScorer {
 public:
  SurpriseScorer(const BipartiteGraph& purchases, const Catalog& catalog, const CategoryRelevance& relevance,
                 const ClusterAssignment* clusters, SurpriseParams params)
      : purchases_(&purchases), catalog_(&catalog), relevance_(&relevance), params_(params) {
    params_.validate();
    if (clusters != nullptr) clusters_ = *clusters;
    cluster_graph_ = cluster_purchase_graph(purchases, clusters_);
  }

  SurpriseList operator()(const LocalNeighborhood& hood) const {
    const ItemId seed = hood.seed;
    const CategoryId seed_cat = catalog_->require_category(seed);

    std::unordered_map<ItemId, DecayedCooccurrence> acc;
    for (const auto& m : hood.members) {
      const Timestamp t_seed = m.time_of(seed);
      for (std::size_t k = 0; k < m.items.size(); ++k) {
        const ItemId j = m.items[k];
        if (j == seed || m.times[k] < t_seed) continue;
        auto& a = acc[j];
        a.count += 1;
        a.decay += 1.0 / (1.0 + static_cast<double>(m.times[k] - t_seed) / params_.time_unit);
      }
    }

    // Cluster-level accumulation for L(seed) over the cluster purchase graph.
    const ClusterLabel seed_cluster = clusters_.label_or_self(seed);
    std::unordered_map<ClusterLabel, double> cluster_acc;
    auto cluster_users = cluster_graph_.users_of(seed_cluster);
    auto cluster_times = cluster_graph_.user_times_of(seed_cluster);
    for (std::size_t k = 0; k < cluster_users.size(); ++k) {
      auto labels = cluster_graph_.items_of(cluster_users[k]);
      auto times = cluster_graph_.item_times_of(cluster_users[k]);
      for (std::size_t x = 0; x < labels.size(); ++x) {
        if (times[x] < cluster_times[k]) continue;
        cluster_acc[labels[x]] += 1.0 / (1.0 + static_cast<double>(times[x] - cluster_times[k]) / params_.time_unit);
      }
    }

    const std::size_t seed_degree = hood.members.size();
    const std::size_t seed_cluster_degree = cluster_users.size();
    std::vector<SurpriseEntry> entries;
    entries.reserve(acc.size());
    for (const auto& [j, co] : acc) {
      if (!relevance_->is_related(seed_cat, catalog_->require_category(j))) continue;
      SurpriseEntry e{j, 0.0, 0.0, 0.0};
      if (co.count > params_.gamma) {
        e.s1 = co.decay / params_.denominator(seed_degree, purchases_->item_degree(j));
      }
      const ClusterLabel lj = clusters_.label_or_self(j);
      if (auto it = cluster_acc.find(lj); it != cluster_acc.end()) {
        e.s2 = it->second / params_.denominator(seed_cluster_degree, cluster_graph_.item_degree(lj));
      }
      e.score = surprise_score(e.s1, e.s2, params_.omega);
      entries.push_back(e);
    }
    rank_entries(seed, entries, params_.top_k);
    return SurpriseList{seed, std::move(entries)};
  }

  const SurpriseParams& params() const { return params_; }
  const BipartiteGraph& cluster_graph() const { return cluster_graph_; }

 private:
  const BipartiteGraph* purchases_;
  const Catalog* catalog_;
  const CategoryRelevance* relevance_;
  ClusterAssignment clusters_;
  SurpriseParams params_;
  BipartiteGraph cluster_graph_;
};

// Sequential full index, ascending seed.
inline std::vector<SurpriseList> surprise_all(const BipartiteGraph& purchases, const Catalog& catalog,
                                              const CategoryRelevance& relevance, const ClusterAssignment* clusters,
                                              const SurpriseParams& params) {
  SurpriseScorer scorer(purchases, catalog, relevance, clusters, params);
  std::vector<SurpriseList> out;
  out.reserve(purchases.items().size());
  for (ItemId i : purchases.items()) out.push_back(scorer(neighborhood_of(purchases, i)));
  return out;
}

}  // namespace prodgraph
