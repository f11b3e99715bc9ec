#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "commtrack/graph.hpp"

namespace commtrack {

/// Address of a static community: snapshot (0-based) and index in that
/// snapshot's Partition.
struct CommunityRef {
  std::uint32_t snapshot = 0;
  std::uint32_t community = 0;
  auto operator<=>(const CommunityRef&) const = default;
};

/// |a ∩ b| for sorted ranges.
std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b);

/// |a ∩ b| / min(|a|, |b|). Inputs must be sorted and nonempty.
double overlap_coefficient(std::span<const NodeId> a, std::span<const NodeId> b);
/// |a ∩ b| / |a ∪ b|. Inputs sorted; at least one nonempty.
double jaccard(std::span<const NodeId> a, std::span<const NodeId> b);

enum class SimilarityMetric { overlap, jaccard };

double similarity(SimilarityMetric metric, std::span<const NodeId> a, std::span<const NodeId> b);

struct SimilarityEdge {
  std::uint32_t a;  // vertex index, a < b
  std::uint32_t b;
  double weight;
};

/// Community similarity network: one vertex per static community, weighted
/// edges between communities of distinct snapshots with nonzero similarity.
class SimilarityNetwork {
 public:
  std::vector<CommunityRef> vertices;   // sorted by (snapshot, community)
  std::vector<std::vector<NodeId>> members;  // members[v] of vertices[v]
  std::vector<SimilarityEdge> edges;    // sorted by (a, b)

  std::size_t size() const { return vertices.size(); }
  std::size_t vertex_of(CommunityRef ref) const;
  std::size_t snapshot_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  /// The network as a Graph over vertex indices (all vertices present).
  Graph to_graph() const;

  /// Registers one snapshot's communities; used by build().
  void append_snapshot(const Partition& p);

 private:
  std::vector<std::size_t> offsets_{0};
};

/// Compares every community with every community of each later snapshot and
/// links pairs with similarity > 0. `threads` > 1 shards source snapshots;
/// output is identical for any thread count.
SimilarityNetwork build_similarity_network(std::span<const Partition> partitions,
                                           SimilarityMetric metric = SimilarityMetric::overlap,
                                           unsigned threads = 1);

/// Debug dump, one `i.ci j.cj weight` line per edge (1-based snapshots).
void write_similarity_network(std::ostream& out, const SimilarityNetwork& net);

}  // namespace commtrack
