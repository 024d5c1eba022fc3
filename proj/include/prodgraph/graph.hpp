#pragma once

#include <algorithm>
#include <span>
#include <tuple>
#include <vector>

#include "prodgraph/types.hpp"

namespace prodgraph {

// Immutable user <-> item adjacency for one action kind.
//
// Both sides are stored in CSR form indexed by the dense id value. Every
// adjacency list is strictly ascending, and each (user, item) edge carries the
// earliest timestamp observed for that pair. Safe for concurrent reads.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  // Keeps events whose action matches, collapses repeated (user, item) pairs
  // to one edge with the earliest timestamp. Throws ValidationError when no
  // event survives the filter.
  static BipartiteGraph from_events(std::span<const BehaviorEvent> events, Action action) {
    struct Edge {
      std::uint64_t user;
      std::uint64_t item;
      Timestamp time;
    };
    std::vector<Edge> edges;
    edges.reserve(events.size());
    for (const auto& e : events) {
      if (e.action != action) continue;
      if (e.timestamp < 0) {
        throw ValidationError("negative timestamp for user " + std::to_string(e.user.value));
      }
      edges.push_back({e.user.value, e.item.value, e.timestamp});
    }
    if (edges.empty()) {
      throw ValidationError(std::string("no events with action '") + to_string(action) + "'");
    }

    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.user, a.item, a.time) < std::tie(b.user, b.item, b.time);
    });
    // After sorting, the first record of each (user, item) run has the earliest time.
    auto last = std::unique(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.user == b.user && a.item == b.item;
    });
    edges.erase(last, edges.end());

    BipartiteGraph g;
    g.action_ = action;
    std::uint64_t max_user = 0;
    std::uint64_t max_item = 0;
    for (const auto& e : edges) {
      max_user = std::max(max_user, e.user);
      max_item = std::max(max_item, e.item);
    }

    g.user_offsets_.assign(max_user + 2, 0);
    g.user_items_.reserve(edges.size());
    g.user_times_.reserve(edges.size());
    for (const auto& e : edges) {
      ++g.user_offsets_[e.user + 1];
      g.user_items_.push_back(ItemId{e.item});
      g.user_times_.push_back(e.time);
    }
    for (std::size_t i = 1; i < g.user_offsets_.size(); ++i) g.user_offsets_[i] += g.user_offsets_[i - 1];

    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.item, a.user) < std::tie(b.item, b.user);
    });
    g.item_offsets_.assign(max_item + 2, 0);
    g.item_users_.reserve(edges.size());
    g.item_times_.reserve(edges.size());
    for (const auto& e : edges) {
      ++g.item_offsets_[e.item + 1];
      g.item_users_.push_back(UserId{e.user});
      g.item_times_.push_back(e.time);
    }
    for (std::size_t i = 1; i < g.item_offsets_.size(); ++i) g.item_offsets_[i] += g.item_offsets_[i - 1];

    for (std::uint64_t u = 0; u <= max_user; ++u) {
      if (g.user_offsets_[u + 1] > g.user_offsets_[u]) g.users_.push_back(UserId{u});
    }
    for (std::uint64_t i = 0; i <= max_item; ++i) {
      if (g.item_offsets_[i + 1] > g.item_offsets_[i]) g.items_.push_back(ItemId{i});
    }
    return g;
  }

  Action action() const { return action_; }

  // I_u, ascending.
  std::span<const ItemId> items_of(UserId u) const {
    if (u.value + 1 >= user_offsets_.size()) return {};
    return {user_items_.data() + user_offsets_[u.value], user_items_.data() + user_offsets_[u.value + 1]};
  }
  std::span<const Timestamp> item_times_of(UserId u) const {
    if (u.value + 1 >= user_offsets_.size()) return {};
    return {user_times_.data() + user_offsets_[u.value], user_times_.data() + user_offsets_[u.value + 1]};
  }

  // U_i, ascending.
  std::span<const UserId> users_of(ItemId i) const {
    if (i.value + 1 >= item_offsets_.size()) return {};
    return {item_users_.data() + item_offsets_[i.value], item_users_.data() + item_offsets_[i.value + 1]};
  }
  std::span<const Timestamp> user_times_of(ItemId i) const {
    if (i.value + 1 >= item_offsets_.size()) return {};
    return {item_times_.data() + item_offsets_[i.value], item_times_.data() + item_offsets_[i.value + 1]};
  }

  std::size_t user_degree(UserId u) const { return items_of(u).size(); }
  std::size_t item_degree(ItemId i) const { return users_of(i).size(); }

  bool contains(ItemId i) const { return item_degree(i) > 0; }
  bool contains(UserId u) const { return user_degree(u) > 0; }

  // Stored nodes (degree >= 1), ascending.
  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ItemId>& items() const { return items_; }

  std::size_t edge_count() const { return user_items_.size(); }

  // One past the largest item id value that can appear in this graph.
  std::size_t item_id_bound() const { return item_offsets_.empty() ? 0 : item_offsets_.size() - 1; }

  // Edge dump in (user, item) order; feeding it back to from_events rebuilds
  // an identical graph.
  std::vector<BehaviorEvent> edges() const {
    std::vector<BehaviorEvent> out;
    out.reserve(edge_count());
    for (UserId u : users_) {
      auto items = items_of(u);
      auto times = item_times_of(u);
      for (std::size_t k = 0; k < items.size(); ++k) out.push_back({u, items[k], action_, times[k]});
    }
    return out;
  }

  bool operator==(const BipartiteGraph&) const = default;

 private:
  Action action_ = Action::Click;
  std::vector<std::size_t> user_offsets_;
  std::vector<ItemId> user_items_;
  std::vector<Timestamp> user_times_;
  std::vector<std::size_t> item_offsets_;
  std::vector<UserId> item_users_;
  std::vector<Timestamp> item_times_;
  std::vector<UserId> users_;
  std::vector<ItemId> items_;
};

// One user adjacent to a seed item, together with that user's full item list.
struct NeighborhoodMember {
  UserId user;
  std::span<const ItemId> items;
  std::span<const Timestamp> times;

  // Timestamp of this member's edge to `item`; the item must be in `items`.
  Timestamp time_of(ItemId item) const {
    auto it = std::lower_bound(items.begin(), items.end(), item);
    if (it == items.end() || *it != item) {
      throw ConsistencyError("item " + std::to_string(item.value) + " missing from user " +
                             std::to_string(user.value) + " item list");
    }
    return times[static_cast<std::size_t>(it - items.begin())];
  }
};

// Everything a scorer may read about one seed: U_seed and I_u for each member.
// This is exactly what a reducer sees after the neighborhood broadcast.
struct LocalNeighborhood {
  ItemId seed;
  std::vector<NeighborhoodMember> members;  // ascending by user
};

inline LocalNeighborhood neighborhood_of(const BipartiteGraph& graph, ItemId seed) {
  LocalNeighborhood hood{seed, {}};
  for (UserId u : graph.users_of(seed)) {
    hood.members.push_back({u, graph.items_of(u), graph.item_times_of(u)});
  }
  return hood;
}

// Sorted-list intersection size.
template <typename T>
std::size_t intersection_size(std::span<const T> a, std::span<const T> b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

}  // namespace prodgraph
