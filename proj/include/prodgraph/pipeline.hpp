#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "prodgraph/graph.hpp"
#include "prodgraph/types.hpp"

namespace prodgraph {

// In-process map/shuffle/reduce over item keys.
//
// Map: every user row (u, I_u) is broadcast once per item in I_u, keyed by
// that item. Shuffle: records are partitioned by key into shards, then grouped
// by key. Reduce: each key rebuilds U_key and the members' item lists and
// hands that neighborhood to a scorer. Shards are independent; the merged
// output is sorted by seed and does not depend on shard or worker counts.

enum class Partitioner { Hash, Range };

struct ShardPlan {
  std::size_t shard_count = 1;
  std::size_t worker_count = 1;
  Partitioner partitioner = Partitioner::Hash;

  void validate() const {
    if (shard_count == 0) throw ValidationError("shard count must be at least 1");
    if (worker_count == 0) throw ValidationError("worker count must be at least 1");
  }

  // `id_bound` is one past the largest item id value (used by Range).
  std::size_t shard_of(ItemId item, std::size_t id_bound) const {
    if (partitioner == Partitioner::Range) {
      const std::size_t bound = std::max<std::size_t>(id_bound, 1);
      return static_cast<std::size_t>((static_cast<unsigned __int128>(item.value) * shard_count) / bound) %
             shard_count;
    }
    return static_cast<std::size_t>(mix(item.value) % shard_count);
  }

  // splitmix64 finalizer: stable across runs and platforms.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
};

struct UserRow {
  UserId user;
  std::span<const ItemId> items;
  std::span<const Timestamp> times;
};

// key -> (user, full item list of that user)
struct EmitRecord {
  ItemId key;
  UserId user;
  std::span<const ItemId> items;
  std::span<const Timestamp> times;
};

inline void map_row(const UserRow& row, std::vector<EmitRecord>& out) {
  for (ItemId item : row.items) out.push_back({item, row.user, row.items, row.times});
}

inline std::vector<EmitRecord> map_stage(std::span<const UserRow> rows) {
  std::vector<EmitRecord> out;
  for (const auto& row : rows) map_row(row, out);
  return out;
}

inline std::vector<UserRow> user_rows(const BipartiteGraph& graph) {
  std::vector<UserRow> rows;
  rows.reserve(graph.users().size());
  for (UserId u : graph.users()) rows.push_back({u, graph.items_of(u), graph.item_times_of(u)});
  return rows;
}

// Rebuilds the neighborhood of `key` from its co-located records and scores it.
// Records must all carry `key`, come from distinct users, and each item list
// must contain the key; anything else means records were lost or misrouted.
template <typename Scorer>
auto reduce_stage(ItemId key, std::span<const EmitRecord> records, const Scorer& scorer) {
  if (records.empty()) throw ConsistencyError("no records for key " + std::to_string(key.value));
  LocalNeighborhood hood{key, {}};
  hood.members.reserve(records.size());
  for (const auto& r : records) {
    if (r.key != key) {
      throw ConsistencyError("record keyed " + std::to_string(r.key.value) + " routed to key " +
                             std::to_string(key.value));
    }
    if (!std::binary_search(r.items.begin(), r.items.end(), key)) {
      throw ConsistencyError("record for key " + std::to_string(key.value) + " from user " +
                             std::to_string(r.user.value) + " does not contain the key");
    }
    hood.members.push_back({r.user, r.items, r.times});
  }
  std::sort(hood.members.begin(), hood.members.end(),
            [](const NeighborhoodMember& a, const NeighborhoodMember& b) { return a.user < b.user; });
  for (std::size_t k = 1; k < hood.members.size(); ++k) {
    if (hood.members[k].user == hood.members[k - 1].user) {
      throw ConsistencyError("duplicate record for key " + std::to_string(key.value) + " from user " +
                             std::to_string(hood.members[k].user.value));
    }
  }
  return scorer(hood);
}

struct ShardTiming {
  std::size_t shard = 0;
  std::size_t keys = 0;
  std::size_t records = 0;
  std::size_t footprint = 0;  // sum of |I_u| over the shard's records
  double reduce_ms = 0.0;
};

template <typename Result>
struct PipelineResult {
  std::vector<Result> lists;  // ascending seed
  std::vector<ShardTiming> shards;
  std::size_t emitted = 0;
  double map_ms = 0.0;
};

using ShardDumper = std::function<void(std::size_t shard, std::span<const EmitRecord> records)>;

template <typename Scorer>
auto run_pipeline(const BipartiteGraph& graph, const Scorer& scorer, const ShardPlan& plan,
                  const ShardDumper& dump = {}) {
  using Result = std::decay_t<decltype(scorer(std::declval<const LocalNeighborhood&>()))>;
  using Clock = std::chrono::steady_clock;
  plan.validate();

  PipelineResult<Result> result;
  const auto map_start = Clock::now();
  std::vector<std::vector<EmitRecord>> shards(plan.shard_count);
  {
    std::vector<EmitRecord> row_out;
    for (const auto& row : user_rows(graph)) {
      row_out.clear();
      map_row(row, row_out);
      for (const auto& rec : row_out) shards[plan.shard_of(rec.key, graph.item_id_bound())].push_back(rec);
      result.emitted += row_out.size();
    }
  }
  result.map_ms = std::chrono::duration<double, std::milli>(Clock::now() - map_start).count();
  if (result.emitted != graph.edge_count()) {
    throw ConsistencyError("map stage emitted " + std::to_string(result.emitted) + " records for " +
                           std::to_string(graph.edge_count()) + " edges");
  }

  for (auto& shard : shards) {
    std::sort(shard.begin(), shard.end(), [](const EmitRecord& a, const EmitRecord& b) {
      if (a.key != b.key) return a.key < b.key;
      return a.user < b.user;
    });
  }
  if (dump) {
    for (std::size_t s = 0; s < shards.size(); ++s) dump(s, shards[s]);
  }

  std::vector<std::vector<Result>> outputs(plan.shard_count);
  std::vector<ShardTiming> timing(plan.shard_count);
  std::vector<std::exception_ptr> failures(plan.shard_count);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t s = next++; s < plan.shard_count; s = next++) {
      const auto start = Clock::now();
      try {
        const auto& recs = shards[s];
        ShardTiming t;
        t.shard = s;
        t.records = recs.size();
        std::size_t begin = 0;
        while (begin < recs.size()) {
          std::size_t end = begin;
          while (end < recs.size() && recs[end].key == recs[begin].key) {
            t.footprint += recs[end].items.size();
            ++end;
          }
          outputs[s].push_back(
              reduce_stage(recs[begin].key, std::span<const EmitRecord>(recs.data() + begin, end - begin), scorer));
          ++t.keys;
          begin = end;
        }
        t.reduce_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        timing[s] = t;
      } catch (...) {
        failures[s] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::min(plan.worker_count, plan.shard_count);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t s = 0; s < failures.size(); ++s) {
    if (!failures[s]) continue;
    const std::string prefix = "shard " + std::to_string(s) + ": ";
    try {
      std::rethrow_exception(failures[s]);
    } catch (const ValidationError& e) {
      throw ValidationError(prefix + e.what());
    } catch (const std::exception& e) {
      throw ConsistencyError(prefix + e.what());
    }
  }

  std::size_t keys = 0;
  for (const auto& out : outputs) keys += out.size();
  if (keys != graph.items().size()) {
    throw ConsistencyError("reduce produced " + std::to_string(keys) + " keys for " +
                           std::to_string(graph.items().size()) + " items");
  }

  result.lists.reserve(keys);
  for (auto& out : outputs) {
    for (auto& list : out) result.lists.push_back(std::move(list));
  }
  std::sort(result.lists.begin(), result.lists.end(),
            [](const Result& a, const Result& b) { return a.seed < b.seed; });
  result.shards = std::move(timing);
  return result;
}

}  // namespace prodgraph
