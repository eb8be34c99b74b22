#include "svmf/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include <json.hpp>

#include "svmf/errors.hpp"

namespace svmf {

SubstructureGraph::SubstructureGraph(
    std::string image_key, std::vector<Node> nodes,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& edges)
    : image_key_(std::move(image_key)), nodes_(std::move(nodes)) {
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_by_id_.emplace(nodes_[i].instance_id, i).second) {
      throw ValidationError("duplicate instance_id " +
                            std::to_string(nodes_[i].instance_id));
    }
  }
  for (const auto& [a, b] : edges) {
    if (a == b) {
      throw ValidationError("self-loop on instance " + std::to_string(a));
    }
    const std::size_t ia = index_of(a);
    const std::size_t ib = index_of(b);
    adjacency_[ia].push_back(ib);
    adjacency_[ib].push_back(ia);
  }
  for (auto& neighbors : adjacency_) {
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()),
                    neighbors.end());
  }
  std::size_t degree_sum = 0;
  for (const auto& neighbors : adjacency_) {
    degree_sum += neighbors.size();
  }
  edge_count_ = degree_sum / 2;
}

bool SubstructureGraph::has_instance(std::int64_t instance_id) const {
  return index_by_id_.count(instance_id) != 0;
}

std::size_t SubstructureGraph::index_of(std::int64_t instance_id) const {
  auto it = index_by_id_.find(instance_id);
  if (it == index_by_id_.end()) {
    throw LookupError("unknown instance_id " + std::to_string(instance_id));
  }
  return it->second;
}

std::vector<std::pair<std::int64_t, std::int64_t>>
SubstructureGraph::sorted_edges() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  edges.reserve(edge_count_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j : adjacency_[i]) {
      if (i < j) {
        const auto a = nodes_[i].instance_id;
        const auto b = nodes_[j].instance_id;
        edges.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::string SubstructureGraph::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : nodes_) {
    nodes.push_back({node.instance_id, node.class_id});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : sorted_edges()) {
    edges.push_back({a, b});
  }
  return nlohmann::json{{"nodes", nodes}, {"edges", edges}}.dump();
}

void DistanceTable::insert(std::int64_t a, std::int64_t b, int d) {
  if (a == b) {
    throw DomainError("self-pair distances are not stored");
  }
  if (d < 0 || d > cap_) {
    throw DomainError("distance " + std::to_string(d) + " outside [0, cap]");
  }
  distances_[{std::min(a, b), std::max(a, b)}] = d;
}

std::optional<int> DistanceTable::find(std::int64_t a, std::int64_t b) const {
  auto it = distances_.find({std::min(a, b), std::max(a, b)});
  if (it == distances_.end()) {
    return std::nullopt;
  }
  return it->second;
}

SubstructureGraph build_graph(const DetectionSet& set, double factor) {
  std::vector<SubstructureGraph::Node> nodes;
  nodes.reserve(set.instances.size());
  for (const auto& inst : set.instances) {
    nodes.push_back({inst.instance_id, inst.class_id});
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  if (set.instances.size() > 1) {
    const double margin = expansion_margin(set, factor);
    std::vector<BoundingBox> expanded;
    expanded.reserve(set.instances.size());
    for (const auto& inst : set.instances) {
      expanded.push_back(expand_box(inst.box, margin));
    }
    for (std::size_t i = 0; i < expanded.size(); ++i) {
      for (std::size_t j = i + 1; j < expanded.size(); ++j) {
        if (boxes_overlap(expanded[i], expanded[j])) {
          edges.emplace_back(set.instances[i].instance_id,
                             set.instances[j].instance_id);
        }
      }
    }
  }
  return SubstructureGraph(set.image_key, std::move(nodes), edges);
}

namespace {

constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

// BFS edge-distances from source, truncated at max_edges.
std::vector<std::size_t> bfs_truncated(const SubstructureGraph& g,
                                       std::size_t source,
                                       std::size_t max_edges) {
  std::vector<std::size_t> dist(g.node_count(), kUnvisited);
  dist[source] = 0;
  std::deque<std::size_t> queue{source};
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (dist[u] == max_edges) {
      continue;
    }
    for (std::size_t v : g.neighbors(u)) {
      if (dist[v] == kUnvisited) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

std::optional<int> instance_distance(const SubstructureGraph& g,
                                     std::int64_t a, std::int64_t b) {
  if (a == b) {
    throw DomainError("instance distance requires two distinct instances");
  }
  const std::size_t ia = g.index_of(a);
  const std::size_t ib = g.index_of(b);
  const auto dist = bfs_truncated(g, ia, g.node_count());
  if (dist[ib] == kUnvisited) {
    return std::nullopt;
  }
  // Path edge count minus one: the number of intermediate substructures.
  return static_cast<int>(dist[ib]) - 1;
}

DistanceTable all_pairs_distances_capped(const SubstructureGraph& g, int cap) {
  if (cap < 0) {
    throw DomainError("distance cap must be nonnegative");
  }
  DistanceTable table(cap);
  const std::size_t max_edges = static_cast<std::size_t>(cap) + 1;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto dist = bfs_truncated(g, i, max_edges);
    const std::int64_t id_i = g.nodes()[i].instance_id;
    for (std::size_t j = 0; j < g.node_count(); ++j) {
      if (j == i || dist[j] == kUnvisited) {
        continue;
      }
      const std::int64_t id_j = g.nodes()[j].instance_id;
      if (id_i < id_j) {
        table.insert(id_i, id_j, static_cast<int>(dist[j]) - 1);
      }
    }
  }
  return table;
}

}  // namespace svmf
