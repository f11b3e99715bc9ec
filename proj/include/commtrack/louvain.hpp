#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "commtrack/graph.hpp"

namespace commtrack {

/// Newman modularity of `p` on `g`. Present vertices not covered by `p`
/// count as singletons. Throws Error when g has no edge weight.
double modularity(const Graph& g, const Partition& p);

using CommunityId = std::uint32_t;

/// Community assignment of every vertex plus the per-community sums used by
/// the incremental gain. `internal[c]` is the sum of A_xy over ordered pairs
/// inside c (loops included), `total[c]` the sum of member degrees.
class ModularityState {
 public:
  /// Every vertex starts in its own community (community id == vertex id).
  explicit ModularityState(const Graph& g);

  const Graph& graph() const { return *graph_; }
  CommunityId community_of(NodeId x) const { return community_[x]; }
  std::size_t community_count() const { return internal_.size(); }
  double internal(CommunityId c) const { return internal_[c]; }
  double total(CommunityId c) const { return total_[c]; }
  double twice_m() const { return twice_m_; }

  /// Weight of edges between x and members of c other than x.
  double weight_to(NodeId x, CommunityId c) const;

  /// Detaches x into the "isolated" state (community_of(x) becomes kNone).
  void remove(NodeId x, double weight_to_own);
  void insert(NodeId x, CommunityId c, double weight_to_target);

  /// Modularity recomputed from the cached sums.
  double value() const;

  static constexpr CommunityId kNone = UINT32_MAX;

 private:
  const Graph* graph_;
  std::vector<CommunityId> community_;
  std::vector<double> internal_;
  std::vector<double> total_;
  double twice_m_;
};

/// Modularity change of inserting the isolated vertex x into `target`:
///   [(S_in + 2 k_x,in)/2m - ((S_tot + k_x)/2m)^2] - [S_in/2m - (S_tot/2m)^2 - (k_x/2m)^2]
/// Throws Error if `target` is not a community id of `state`.
double modularity_gain(const ModularityState& state, NodeId x, CommunityId target);
/// Same formula with k_x,in supplied by the caller.
double modularity_gain(const ModularityState& state, NodeId x, CommunityId target, double weight_to_target);

struct MoveRecord {
  NodeId vertex;
  CommunityId from;
  CommunityId to;
  /// Gain of the chosen community minus gain of returning home (> 0).
  double improvement;
};

struct LocalMoveOptions {
  std::uint64_t seed = 42;
  /// A sweep whose accumulated improvement is below this ends the phase.
  double sweep_tolerance = 1e-7;
  std::size_t max_sweeps = 10000;
};

struct LocalMoveStats {
  std::size_t sweeps = 0;
  std::size_t moves = 0;
  double improvement = 0.0;
};

using MoveObserver = std::function<void(const MoveRecord&, const ModularityState&)>;

/// First Louvain phase. Vertices are visited in a seed-determined order
/// (one permutation reused by every sweep). A vertex leaves its community
/// only for a strictly better one; equal gains go to the lowest community id.
LocalMoveStats local_moving(ModularityState& state, const LocalMoveOptions& options,
                            const MoveObserver& observer = {});

struct LouvainResult {
  /// Finest to coarsest, in the vertex space of the input graph.
  std::vector<Partition> levels;
  std::vector<double> modularity;
  std::uint64_t seed = 0;
};

/// Full Louvain: local moving + aggregation, repeated while modularity grows.
/// Zero-degree vertices never appear in the returned partitions.
LouvainResult detect(const Graph& g, std::uint64_t seed, std::size_t max_passes = 100);

/// Level whose community count is closest to target_count; ties go to the
/// finer level.
const Partition& pick_level(const LouvainResult& result, std::size_t target_count);

/// Coarsened graph whose vertices are the communities of `assignment`
/// (dense ids in [0, community_count)). Preserves m and modularity.
Graph aggregate(const Graph& g, const std::vector<CommunityId>& assignment, std::size_t community_count);

}  // namespace commtrack
