#pragma once

// Test corpora: hand fixtures and seeded random generators.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "prodgraph/prodgraph.hpp"

namespace fixtures {

using namespace prodgraph;

struct Corpus {
  Dictionaries dicts;
  std::vector<BehaviorEvent> events;

  void add(const std::string& user, const std::string& item, Action action, Timestamp ts) {
    events.push_back({dicts.users.intern(user), dicts.items.intern(item), action, ts});
  }
  ItemId item(const std::string& name) const { return *dicts.items.find(name); }
  UserId user(const std::string& name) const { return *dicts.users.find(name); }
  const std::string& name(ItemId i) const { return dicts.items.name(i); }
};

// Five users around seed h: [A,z], [C,y], [E,o], [E,x] are lone edges.
inline Corpus fig2_clicks() {
  Corpus c;
  const std::vector<std::pair<std::string, std::vector<std::string>>> rows = {
      {"A", {"h", "t", "r", "p", "z"}},
      {"B", {"h", "t", "r", "p"}},
      {"C", {"h", "p", "q", "y"}},
      {"D", {"h", "q"}},
      {"E", {"h", "q", "o", "x"}},
  };
  Timestamp ts = 1000;
  for (const auto& [user, items] : rows) {
    for (const auto& item : items) c.add(user, item, Action::Click, ts++);
  }
  return c;
}

// Degree-padded cosine fixture: |U_h|=5, |U_t|=15, |U_p|=40, |U_q|=60,
// |U_z|=4 and overlaps with h of t=2, z=1, p=3, q=3.
inline Corpus cosine_padded() {
  Corpus c;
  Timestamp ts = 1;
  auto click = [&](const std::string& u, const std::string& i) { c.add(u, i, Action::Click, ts++); };
  const std::vector<std::string> h_users = {"u1", "u2", "u3", "u4", "u5"};
  for (const auto& u : h_users) click(u, "h");
  click("u1", "t");
  click("u2", "t");
  click("u3", "z");
  click("u1", "p");
  click("u2", "p");
  click("u3", "p");
  click("u3", "q");
  click("u4", "q");
  click("u5", "q");
  auto pad = [&](const std::string& item, int have, int want) {
    for (int k = have; k < want; ++k) click(item + "_pad" + std::to_string(k), item);
  };
  pad("t", 2, 15);
  pad("p", 3, 40);
  pad("q", 3, 60);
  pad("z", 1, 4);
  return c;
}

// Random click events over `users` x `items`. Each user gets between 1 and
// `max_per_user` clicks; repeated pairs are allowed.
inline std::vector<BehaviorEvent> random_clicks(std::size_t users, std::size_t items, std::size_t max_per_user,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> item_dist(0, items - 1);
  std::uniform_int_distribution<std::size_t> count_dist(1, max_per_user);
  std::uniform_int_distribution<Timestamp> time_dist(0, 1'000'000);
  std::vector<BehaviorEvent> out;
  for (std::size_t u = 0; u < users; ++u) {
    const auto n = count_dist(rng);
    for (std::size_t k = 0; k < n; ++k) {
      out.push_back({UserId{u}, ItemId{item_dist(rng)}, Action::Click, time_dist(rng)});
    }
  }
  return out;
}

// Every user clicks exactly `degree` distinct items.
inline std::vector<BehaviorEvent> equal_degree_clicks(std::size_t users, std::size_t items, std::size_t degree,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> pool(items);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<BehaviorEvent> out;
  for (std::size_t u = 0; u < users; ++u) {
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t k = 0; k < degree; ++k) out.push_back({UserId{u}, ItemId{pool[k]}, Action::Click, 0});
  }
  return out;
}

// Graph with fixed item count T, fixed user degree M and average item degree
// N (users = T * N / M).
inline std::vector<BehaviorEvent> fixed_degree_clicks(std::size_t items, std::size_t per_user, std::size_t item_degree,
                                                      std::uint64_t seed) {
  const std::size_t users = items * item_degree / per_user;
  return equal_degree_clicks(users, items, per_user, seed);
}

struct PurchaseCorpus {
  std::vector<BehaviorEvent> events;  // all purchases
  std::vector<std::uint64_t> category_of;  // indexed by item id value
  Catalog catalog;
};

// Random purchases with a random item -> category map. Timestamps span
// `days` days so the decay term varies.
inline PurchaseCorpus random_purchases(std::size_t users, std::size_t items, std::size_t categories,
                                       std::size_t events, std::uint64_t seed, std::int64_t days = 30) {
  std::mt19937_64 rng(seed);
  PurchaseCorpus pc;
  pc.category_of.resize(items);
  for (std::size_t i = 0; i < items; ++i) {
    // every category gets at least one item
    pc.category_of[i] = i < categories ? i : std::uniform_int_distribution<std::size_t>(0, categories - 1)(rng);
    pc.catalog.assign(ItemId{i}, CategoryId{pc.category_of[i]});
  }
  std::uniform_int_distribution<std::size_t> user_dist(0, users - 1);
  std::uniform_int_distribution<std::size_t> item_dist(0, items - 1);
  std::uniform_int_distribution<Timestamp> time_dist(0, days * 86400);
  for (std::size_t k = 0; k < events; ++k) {
    pc.events.push_back({UserId{user_dist(rng)}, ItemId{item_dist(rng)}, Action::Purchase, time_dist(rng)});
  }
  pc.catalog.count_purchases(pc.events);
  return pc;
}

// Random partition of items into clusters of 1..4 members, labelled by a
// member. Items with id >= `mapped` are left out (singleton fallback).
inline ClusterAssignment random_clusters(std::size_t items, std::size_t mapped, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> pool(std::min(items, mapped));
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_int_distribution<std::size_t> size_dist(1, 4);
  std::vector<std::pair<ItemId, ClusterLabel>> entries;
  std::size_t k = 0;
  while (k < pool.size()) {
    const std::size_t n = std::min(size_dist(rng), pool.size() - k);
    const ItemId label{pool[k]};
    for (std::size_t x = 0; x < n; ++x) entries.emplace_back(ItemId{pool[k + x]}, label);
    k += n;
  }
  return ClusterAssignment(std::move(entries));
}

// Planted substitute structure. Items [0, groups*group_size) form groups;
// items above that are a long tail. Each user picks one group, clicks
// `group_clicks` of its items and `noise_clicks` random tail items, all in
// one session starting at a random time in [0, span).
struct PlantedSpec {
  std::size_t groups = 25;
  std::size_t group_size = 12;
  std::size_t tail = 4000;
  std::size_t users = 3000;
  std::size_t group_clicks = 3;
  std::size_t noise_clicks = 2;
  Timestamp span = 20 * 86400;
};

inline std::vector<BehaviorEvent> planted_clicks(const PlantedSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> group_dist(0, spec.groups - 1);
  std::uniform_int_distribution<std::size_t> tail_dist(0, spec.tail - 1);
  std::uniform_int_distribution<Timestamp> start_dist(0, spec.span - 1);
  std::vector<std::uint64_t> members(spec.group_size);
  std::vector<BehaviorEvent> out;
  const std::size_t head = spec.groups * spec.group_size;
  for (std::size_t u = 0; u < spec.users; ++u) {
    const std::size_t g = group_dist(rng);
    std::iota(members.begin(), members.end(), g * spec.group_size);
    std::shuffle(members.begin(), members.end(), rng);
    std::vector<std::uint64_t> picks(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(spec.group_clicks));
    for (std::size_t k = 0; k < spec.noise_clicks; ++k) picks.push_back(head + tail_dist(rng));
    std::shuffle(picks.begin(), picks.end(), rng);
    Timestamp t = start_dist(rng);
    for (auto item : picks) out.push_back({UserId{u}, ItemId{item}, Action::Click, t++});
  }
  return out;
}

}  // namespace fixtures
