#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "prodgraph/dictionary.hpp"
#include "prodgraph/ingest.hpp"
#include "prodgraph/label_propagation.hpp"
#include "prodgraph/pipeline.hpp"
#include "prodgraph/surprise.hpp"
#include "prodgraph/types.hpp"

namespace prodgraph {

// Shortest decimal text that parses back to the same double.
inline std::string format_score(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw ConsistencyError("cannot format score");
  return std::string(buf, ptr);
}

// seed \t neighbor \t score \t rank
inline void write_neighbors(std::ostream& out, std::span<const NeighborList> lists, const IdDictionary<ItemId>& items) {
  for (const auto& list : lists) {
    const auto& seed = items.name(list.seed);
    std::size_t rank = 0;
    for (const auto& n : list.entries) {
      out << seed << '\t' << items.name(n.item) << '\t' << format_score(n.score) << '\t' << ++rank << '\n';
    }
  }
}

// seed \t neighbor \t score \t s1 \t s2 \t rank
inline void write_surprise(std::ostream& out, std::span<const SurpriseList> lists, const IdDictionary<ItemId>& items) {
  for (const auto& list : lists) {
    const auto& seed = items.name(list.seed);
    std::size_t rank = 0;
    for (const auto& e : list.entries) {
      out << seed << '\t' << items.name(e.item) << '\t' << format_score(e.score) << '\t' << format_score(e.s1) << '\t'
          << format_score(e.s2) << '\t' << ++rank << '\n';
    }
  }
}

// item \t cluster_label
inline void write_clusters(std::ostream& out, const ClusterAssignment& clusters, const IdDictionary<ItemId>& items) {
  for (const auto& [item, label] : clusters.entries()) out << items.name(item) << '\t' << items.name(label) << '\n';
}

// category_i \t category_j \t theta \t selected(0|1), rows in descending theta per category_i
inline void write_category_report(std::ostream& out, const CategoryRelevance& relevance,
                                  const IdDictionary<CategoryId>& categories) {
  for (std::size_t i = 0; i < relevance.category_count(); ++i) {
    const CategoryId ci{i};
    for (const auto& c : relevance.row(ci)) {
      out << categories.name(ci) << '\t' << categories.name(c.category) << '\t' << format_score(c.theta) << '\t'
          << (relevance.is_related(ci, c.category) ? 1 : 0) << '\n';
    }
  }
}

inline void write_timing(std::ostream& out, std::span<const ShardTiming> shards, double map_ms) {
  out << "stage\tshard\tkeys\trecords\tfootprint\tmillis\n";
  out << "map\t-\t-\t-\t-\t" << map_ms << '\n';
  for (const auto& s : shards) {
    out << "reduce\t" << s.shard << '\t' << s.keys << '\t' << s.records << '\t' << s.footprint << '\t' << s.reduce_ms
        << '\n';
  }
}

// key \t user \t comma-joined item list
inline void write_shard_records(std::ostream& out, std::span<const EmitRecord> records, const Dictionaries& dicts) {
  for (const auto& r : records) {
    out << dicts.items.name(r.key) << '\t' << dicts.users.name(r.user) << '\t';
    for (std::size_t k = 0; k < r.items.size(); ++k) {
      if (k) out << ',';
      out << dicts.items.name(r.items[k]);
    }
    out << '\n';
  }
}

// Reads a neighbor index (4-column baseline/swing or 6-column surprise form).
// Rows of one seed must be contiguous with ranks 1..n. Lists come back in
// ascending seed id.
inline std::vector<NeighborList> read_neighbors(std::istream& in, IdDictionary<ItemId>& items,
                                                std::string_view source = "index") {
  std::map<ItemId, NeighborList> lists;
  std::string raw;
  std::size_t line_no = 0;
  ItemId current{};
  bool have_current = false;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    auto fail = [&](const std::string& why) {
      throw ValidationError(std::string(source) + " line " + std::to_string(line_no) + ": " + why);
    };
    if (cols.size() != 4 && cols.size() != 6) fail("expected 4 or 6 columns");
    double score = 0.0;
    auto [sp, sec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), score);
    if (sec != std::errc{} || sp != cols[2].data() + cols[2].size()) fail("bad score");
    std::size_t rank = 0;
    auto rank_col = cols.back();
    auto [rp, rec] = std::from_chars(rank_col.data(), rank_col.data() + rank_col.size(), rank);
    if (rec != std::errc{} || rp != rank_col.data() + rank_col.size()) fail("bad rank");

    ItemId seed = items.intern(cols[0]);
    ItemId neighbor = items.intern(cols[1]);
    auto [it, fresh] = lists.try_emplace(seed, NeighborList{seed, {}});
    if (fresh) {
      current = seed;
      have_current = true;
    } else if (!have_current || current != seed) {
      fail("rows for seed '" + std::string(cols[0]) + "' are not contiguous");
    }
    if (rank != it->second.entries.size() + 1) fail("rank out of sequence");
    it->second.entries.push_back({neighbor, score});
  }
  std::vector<NeighborList> out;
  out.reserve(lists.size());
  for (auto& [seed, list] : lists) out.push_back(std::move(list));
  return out;
}

inline std::vector<NeighborList> read_neighbors(const std::filesystem::path& path, IdDictionary<ItemId>& items) {
  auto in = detail::open_input(path);
  return read_neighbors(in, items, path.string());
}

// Every label must itself be a mapped item, so singleton fallbacks for
// unmapped items cannot collide with an existing label.
inline ClusterAssignment read_clusters(std::istream& in, IdDictionary<ItemId>& items,
                                       std::string_view source = "clusters") {
  std::vector<std::pair<ItemId, ClusterLabel>> entries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw ValidationError(std::string(source) + " line " + std::to_string(line_no) +
                            ": expected 'item<TAB>cluster_label'");
    }
    entries.emplace_back(items.intern(cols[0]), items.intern(cols[1]));
  }
  ClusterAssignment clusters(std::move(entries));
  for (const auto& [item, label] : clusters.entries()) {
    if (!clusters.label_of(label)) {
      throw ValidationError(std::string(source) + ": cluster label '" + items.name(label) +
                            "' is not itself a clustered item");
    }
  }
  return clusters;
}

inline ClusterAssignment read_clusters(const std::filesystem::path& path, IdDictionary<ItemId>& items) {
  auto in = detail::open_input(path);
  return read_clusters(in, items, path.string());
}

}  // namespace prodgraph
