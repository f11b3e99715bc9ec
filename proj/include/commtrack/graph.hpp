#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace commtrack {

using NodeId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps external node labels to dense ids, shared by every snapshot of a series.
class NodeIndex {
 public:
  NodeId intern(std::string_view label);
  /// Returns the id of a known label, or -1.
  std::int64_t find(std::string_view label) const;
  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
};

/// Weighted undirected graph over vertices [0, vertex_count()).
///
/// Stored as a symmetric adjacency: every edge (u, v), u != v, appears in both
/// neighbor lists. The diagonal entry A_xx is kept apart in self_loop(x) and is
/// counted once in the weighted degree, so sum of degrees == 2m holds with
/// aggregated loops. Vertices may be absent (not part of this snapshot); absent
/// vertices have no edges.
class Graph {
 public:
  struct Neighbor {
    NodeId vertex;
    double weight;
  };

  Graph() = default;

  std::size_t vertex_count() const { return present_.size(); }
  bool contains(NodeId v) const { return v < present_.size() && present_[v] != 0; }
  std::size_t present_count() const { return present_count_; }

  std::span<const Neighbor> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  double self_loop(NodeId v) const { return loops_[v]; }
  double degree(NodeId v) const { return degrees_[v]; }

  /// Sum of the weights of all edges (m); loops contribute A_xx / 2.
  double total_weight() const { return total_weight_; }
  /// Number of distinct undirected non-loop edges.
  std::size_t edge_count() const { return adjacency_.size() / 2; }

  /// Calls f(u, v, w) once per undirected non-loop edge with u < v.
  template <class F>
  void for_each_edge(F&& f) const {
    for (NodeId u = 0; u < vertex_count(); ++u) {
      for (const auto& n : neighbors(u)) {
        if (u < n.vertex) f(u, n.vertex, n.weight);
      }
    }
  }

  std::vector<NodeId> present_vertices() const;

 private:
  friend class GraphBuilder;
  std::vector<char> present_;
  std::size_t present_count_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> loops_;
  std::vector<double> degrees_;
  double total_weight_ = 0.0;
};

struct WeightedEdge {
  NodeId u, v;
  double w;
};

/// Accumulates edges and produces an immutable Graph. Parallel edges are
/// summed; duplicate_count() reports how many were folded.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t vertex_count, bool allow_self_loops = false);

  /// Graph with every vertex present, built straight from distinct edges
  /// with u < v and positive weight (no duplicate bookkeeping).
  static Graph from_unique_edges(std::size_t vertex_count, std::vector<WeightedEdge> edges);

  void add_vertex(NodeId v);
  void add_edge(NodeId u, NodeId v, double weight);
  /// Sets the diagonal adjacency entry A_vv directly (aggregation).
  void add_self_loop(NodeId v, double diagonal_weight);

  std::size_t duplicate_count() const { return duplicates_; }
  bool has_edge(NodeId u, NodeId v) const;

  Graph build() const;

 private:
  using PendingEdge = WeightedEdge;
  static Graph assemble(std::size_t n, std::vector<char> present, std::vector<double> loops,
                        std::vector<PendingEdge> sorted);
  std::size_t n_;
  bool allow_loops_;
  std::vector<char> present_;
  std::vector<double> loops_;
  std::unordered_map<std::uint64_t, std::size_t> slot_;
  std::vector<PendingEdge> edges_;
  std::size_t duplicates_ = 0;
};

/// Sum of incident edge weights of x. Throws Error for an unknown vertex.
double weighted_degree(const Graph& g, NodeId x);

/// Disjoint communities of one snapshot; members are sorted node ids.
struct Partition {
  std::vector<std::vector<NodeId>> communities;

  std::size_t size() const { return communities.size(); }
  bool empty() const { return communities.empty(); }
  std::size_t member_count() const;
  /// community index per node, -1 for unassigned; `vertex_count` bounds ids.
  std::vector<std::int64_t> membership(std::size_t vertex_count) const;
  /// Sorts members and communities (by smallest member).
  void normalize();
};

using PartitionSeries = std::vector<Partition>;

struct Snapshot {
  Graph graph;
  std::string label;
};

/// Ordered snapshots sharing one node index. Snapshot i (0-based in memory)
/// is written as i + 1 in every file format.
class SnapshotSeries {
 public:
  NodeIndex nodes;
  std::vector<Snapshot> snapshots;

  std::size_t size() const { return snapshots.size(); }
  const Graph& graph(std::size_t i) const { return snapshots.at(i).graph; }
};

}  // namespace commtrack
