#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "prodgraph/types.hpp"

namespace prodgraph {

struct InEdge {
  ItemId from;
  double weight = 0.0;

  bool operator==(const InEdge&) const = default;
};

// Directed similarity graph: each neighbor j in the list of seed i becomes an
// edge j -> i weighted by the list score. Weights need not be symmetric.
class SimilarityDigraph {
 public:
  // `top_n` limits how many entries of each list become edges.
  static SimilarityDigraph from_index(std::span<const NeighborList> index, std::size_t top_n = kUnbounded) {
    std::unordered_map<ItemId, std::vector<InEdge>> in;
    for (const auto& list : index) {
      auto& seed_in = in[list.seed];
      std::size_t taken = 0;
      for (const auto& n : list.entries) {
        if (taken++ == top_n) break;
        if (n.item == list.seed || !(n.score > 0.0)) continue;
        in.try_emplace(n.item);
        seed_in.push_back({n.item, n.score});
      }
    }

    SimilarityDigraph g;
    g.nodes_.reserve(in.size());
    for (const auto& [node, edges] : in) g.nodes_.push_back(node);
    std::sort(g.nodes_.begin(), g.nodes_.end());
    g.in_.reserve(g.nodes_.size());
    for (ItemId node : g.nodes_) {
      auto edges = std::move(in[node]);
      std::sort(edges.begin(), edges.end(), [](const InEdge& a, const InEdge& b) { return a.from < b.from; });
      for (std::size_t k = 1; k < edges.size(); ++k) {
        if (edges[k].from == edges[k - 1].from) {
          throw ValidationError("seed " + std::to_string(node.value) + " lists neighbor " +
                                std::to_string(edges[k].from.value) + " more than once");
        }
      }
      g.in_.push_back(std::move(edges));
    }
    return g;
  }

  // Ascending node ids.
  const std::vector<ItemId>& nodes() const { return nodes_; }

  std::span<const InEdge> in_edges(ItemId node) const {
    auto idx = index_of(node);
    if (!idx) return {};
    return in_[*idx];
  }

  std::optional<std::size_t> index_of(ItemId node) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
    if (it == nodes_.end() || *it != node) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& e : in_) n += e.size();
    return n;
  }

 private:
  std::vector<ItemId> nodes_;
  std::vector<std::vector<InEdge>> in_;  // aligned with nodes_
};

struct LpParams {
  double beta = 0.25;          // a visit updates only when random() > beta
  std::size_t iterations = 10;
  std::uint64_t rng_seed = 0;
  bool stop_when_stable = false;  // end early after a sweep that changes nothing

  void validate() const {
    if (!(beta >= 0.0 && beta < 1.0)) throw ValidationError("beta must lie in [0, 1)");
    if (iterations == 0) throw ValidationError("iterations must be at least 1");
  }
};

// item -> cluster label.
class ClusterAssignment {
 public:
  ClusterAssignment() = default;

  // Entries are sorted by item; duplicate items are rejected.
  explicit ClusterAssignment(std::vector<std::pair<ItemId, ClusterLabel>> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    for (std::size_t k = 1; k < entries_.size(); ++k) {
      if (entries_[k].first == entries_[k - 1].first) {
        throw ValidationError("item " + std::to_string(entries_[k].first.value) + " has more than one cluster label");
      }
    }
  }

  std::optional<ClusterLabel> label_of(ItemId item) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), item,
                               [](const auto& e, ItemId x) { return e.first < x; });
    if (it == entries_.end() || it->first != item) return std::nullopt;
    return it->second;
  }

  // Items absent from the map form singleton clusters labelled by themselves.
  ClusterLabel label_or_self(ItemId item) const { return label_of(item).value_or(item); }

  const std::vector<std::pair<ItemId, ClusterLabel>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t cluster_count() const {
    std::vector<ClusterLabel> labels;
    for (const auto& e : entries_) labels.push_back(e.second);
    std::sort(labels.begin(), labels.end());
    return static_cast<std::size_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
  }

  bool operator==(const ClusterAssignment&) const = default;

 private:
  std::vector<std::pair<ItemId, ClusterLabel>> entries_;
};

// Uniform double in [0, 1) from the top 53 bits of a 64-bit Mersenne Twister.
class UnitRandom {
 public:
  explicit UnitRandom(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Weighted label propagation.
//
// Labels start as node ids. Each sweep visits nodes in ascending id order and
// updates labels in place: a node sums in-edge weights per current in-neighbor
// label and, when random() > beta, adopts the heaviest label (smallest label
// on ties). Nodes without in-edges keep their label. One random draw is
// consumed per visit.
inline ClusterAssignment propagate(const SimilarityDigraph& graph, const LpParams& params) {
  params.validate();
  const auto& nodes = graph.nodes();
  std::vector<ItemId> label(nodes.begin(), nodes.end());

  std::vector<std::vector<std::size_t>> sources(nodes.size());  // in-neighbor positions
  for (std::size_t x = 0; x < nodes.size(); ++x) {
    for (const auto& e : graph.in_edges(nodes[x])) sources[x].push_back(*graph.index_of(e.from));
  }

  UnitRandom rng(params.rng_seed);
  std::unordered_map<ItemId, double> votes;
  for (std::size_t sweep = 0; sweep < params.iterations; ++sweep) {
    bool changed = false;
    for (std::size_t x = 0; x < nodes.size(); ++x) {
      const double draw = rng();
      auto edges = graph.in_edges(nodes[x]);
      if (edges.empty() || !(draw > params.beta)) continue;
      votes.clear();
      for (std::size_t k = 0; k < edges.size(); ++k) votes[label[sources[x][k]]] += edges[k].weight;

      ItemId best = label[x];
      double best_weight = -1.0;
      for (const auto& [candidate, w] : votes) {
        if (w > best_weight || (w == best_weight && candidate < best)) {
          best = candidate;
          best_weight = w;
        }
      }
      if (best != label[x]) {
        label[x] = best;
        changed = true;
      }
    }
    if (params.stop_when_stable && !changed) break;
  }

  std::vector<std::pair<ItemId, ClusterLabel>> entries;
  entries.reserve(nodes.size());
  for (std::size_t x = 0; x < nodes.size(); ++x) entries.emplace_back(nodes[x], label[x]);
  return ClusterAssignment(std::move(entries));
}

}  // namespace prodgraph
