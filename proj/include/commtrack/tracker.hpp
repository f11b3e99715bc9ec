#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "commtrack/graph.hpp"
#include "commtrack/simnet.hpp"

namespace commtrack {

/// A group of static communities representing one evolving community.
struct DynamicCommunity {
  std::uint32_t id = 0;
  /// Constituents sorted by (snapshot, community).
  std::vector<CommunityRef> timeline;
  std::uint32_t first_snapshot = 0;
  std::uint32_t last_snapshot = 0;
  /// Sorted union of the member nodes of all constituents.
  std::vector<NodeId> nodes;
};

/// Builds DynamicCommunity values from groups of refs and renumbers them by
/// earliest snapshot, then size (descending), then first ref. Empty groups are
/// dropped.
std::vector<DynamicCommunity> assemble_dynamic_communities(std::vector<std::vector<CommunityRef>> groups,
                                                           std::span<const Partition> partitions);

/// Common interface of the modularity tracker and the baselines: maps
/// per-snapshot partitions to a partition of all their communities.
class DynamicTracker {
 public:
  virtual ~DynamicTracker() = default;
  virtual std::string name() const = 0;
  virtual std::vector<DynamicCommunity> track(std::span<const Partition> partitions) const = 0;
};

/// Groups the vertices of the similarity network by local modularity
/// optimisation (first Louvain phase only, no aggregation). Returns one vector
/// of vertex indices per cluster. There is deliberately no threshold input.
std::vector<std::vector<std::uint32_t>> cluster_similarity_network(const SimilarityNetwork& net, std::uint64_t seed);

/// Dynamic communities of `net`; node unions come from net.members.
std::vector<DynamicCommunity> track(const SimilarityNetwork& net, std::uint64_t seed);

class ModularityTracker final : public DynamicTracker {
 public:
  explicit ModularityTracker(std::uint64_t seed = 42, SimilarityMetric metric = SimilarityMetric::overlap,
                             unsigned threads = 1)
      : seed_(seed), metric_(metric), threads_(threads) {}

  std::string name() const override { return "modularity"; }
  std::vector<DynamicCommunity> track(std::span<const Partition> partitions) const override;

 private:
  std::uint64_t seed_;
  SimilarityMetric metric_;
  unsigned threads_;
};

/// `dyncomm snapshot community` rows (snapshot 1-based).
void write_dynamic_tsv(std::ostream& out, std::span<const DynamicCommunity> communities);
/// JSON document with timelines and node unions (labels from `nodes`).
std::string dynamic_communities_json(std::span<const DynamicCommunity> communities, const NodeIndex* nodes);
/// Reads `dyncomm snapshot community` rows back into groups of refs.
std::vector<std::vector<CommunityRef>> read_dynamic_tsv(std::istream& in);

}  // namespace commtrack
