#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace prodgraph {

// Opaque dense identifier. The tag keeps user, item and category spaces apart.
template <typename Tag>
struct Id {
  std::uint64_t value = 0;

  constexpr auto operator<=>(const Id&) const = default;
};

struct UserTag {};
struct ItemTag {};
struct CategoryTag {};

using UserId = Id<UserTag>;
using ItemId = Id<ItemTag>;
using CategoryId = Id<CategoryTag>;

// Cluster labels are item ids: every node starts labelled with itself.
using ClusterLabel = ItemId;

// Seconds since epoch.
using Timestamp = std::int64_t;

enum class Action : std::uint8_t { Click, Purchase };

inline const char* to_string(Action a) {
  return a == Action::Click ? "click" : "purchase";
}

struct BehaviorEvent {
  UserId user;
  ItemId item;
  Action action = Action::Click;
  Timestamp timestamp = 0;

  bool operator==(const BehaviorEvent&) const = default;
};

// Error hierarchy. The CLI maps ValidationError / IoError to exit code 1 and
// ConsistencyError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct Neighbor {
  ItemId item;
  double score = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// Ranked top-k list for one seed item.
struct NeighborList {
  ItemId seed;
  std::vector<Neighbor> entries;

  bool operator==(const NeighborList&) const = default;
};

// Sorts candidates by score descending, ties by ascending item id, drops the
// seed and any non-positive or non-finite score, then truncates to k.
// Works for any entry type exposing `item` and `score`.
template <typename Entry>
void rank_entries(ItemId seed, std::vector<Entry>& entries, std::size_t k) {
  std::erase_if(entries, [seed](const Entry& e) {
    return e.item == seed || !std::isfinite(e.score) || e.score <= 0.0;
  });
  auto by_rank = [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  };
  if (k < entries.size()) {
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k),
                      entries.end(), by_rank);
    entries.resize(k);
  } else {
    std::sort(entries.begin(), entries.end(), by_rank);
  }
}

inline NeighborList rank_neighbors(ItemId seed, std::vector<Neighbor> candidates, std::size_t k) {
  rank_entries(seed, candidates, k);
  return NeighborList{seed, std::move(candidates)};
}

}  // namespace prodgraph

template <typename Tag>
struct std::hash<prodgraph::Id<Tag>> {
  std::size_t operator()(const prodgraph::Id<Tag>& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
