#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svmf/detection.hpp"

namespace svmf {

// Instance-level graph: one node per detected substructure instance, one
// undirected edge per expanded-box overlap. No self-loops.
class SubstructureGraph {
 public:
  struct Node {
    std::int64_t instance_id;
    std::int32_t class_id;
  };

  SubstructureGraph() = default;
  SubstructureGraph(std::string image_key, std::vector<Node> nodes,
                    const std::vector<std::pair<std::int64_t, std::int64_t>>& edges);

  const std::string& image_key() const { return image_key_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  bool has_instance(std::int64_t instance_id) const;
  std::size_t index_of(std::int64_t instance_id) const;

  // Neighbor node indexes (not instance ids), sorted ascending.
  const std::vector<std::size_t>& neighbors(std::size_t node_index) const {
    return adjacency_[node_index];
  }

  // Edges as sorted (a, b) instance-id pairs with a < b, lexicographic.
  std::vector<std::pair<std::int64_t, std::int64_t>> sorted_edges() const;

  std::string to_json() const;

 private:
  std::string image_key_;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::map<std::int64_t, std::size_t> index_by_id_;
  std::size_t edge_count_ = 0;
};

// Capped instance-pair distances. d counts the intermediate substructure
// nodes on the shortest path, so directly adjacent instances have d = 0.
// Self-pairs are never stored; keys are (min id, max id).
class DistanceTable {
 public:
  explicit DistanceTable(int cap) : cap_(cap) {}

  int cap() const { return cap_; }
  std::size_t size() const { return distances_.size(); }

  void insert(std::int64_t a, std::int64_t b, int d);
  std::optional<int> find(std::int64_t a, std::int64_t b) const;

  const std::map<std::pair<std::int64_t, std::int64_t>, int>& pairs() const {
    return distances_;
  }

 private:
  int cap_;
  std::map<std::pair<std::int64_t, std::int64_t>, int> distances_;
};

// Node per instance; edge wherever the margin-expanded boxes overlap, with
// the margin derived from the set's smallest diagonal (expansion_margin).
SubstructureGraph build_graph(const DetectionSet& set, double factor);

// Shortest-path edge count minus one between two distinct instances;
// nullopt when disconnected.
std::optional<int> instance_distance(const SubstructureGraph& g,
                                     std::int64_t a, std::int64_t b);

// Every unordered pair with d <= cap, via per-node BFS truncated at
// cap + 1 edges.
DistanceTable all_pairs_distances_capped(const SubstructureGraph& g, int cap);

}  // namespace svmf
