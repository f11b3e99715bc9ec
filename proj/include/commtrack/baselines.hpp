#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "commtrack/graph.hpp"
#include "commtrack/simnet.hpp"
#include "commtrack/tracker.hpp"

namespace commtrack {

enum class BaselineMethod { greene, takaffoli, ged, tajeuna, icem };

std::string_view to_string(BaselineMethod method);
std::optional<BaselineMethod> parse_baseline_method(std::string_view name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::greene;
  /// Matching threshold k in [0, 1].
  double k = 0.1;
  /// Second threshold: GED's j, ICEM's v.
  double secondary = 0.1;
  /// Greene dissolution window; nullopt means never dissolve.
  std::optional<std::size_t> dissolve_after;

  /// Reference settings: Greene k=0.1 d=inf, Takaffoli k=0.3,
  /// GED k=j=0.1, ICEM k=0.1 v=0.5. Tajeuna has no published fixed k.
  static BaselineConfig evaluated(BaselineMethod method);
  void validate() const;
};

/// An accepted pairwise match. `a` is the earlier community.
struct BaselineLink {
  CommunityRef a;
  CommunityRef b;
  double similarity;
  bool strong = false;  // ICEM "very similar" annotation
};

/// Greene: Jaccard matching of each snapshot's communities against the front
/// of every live dynamic community (many-to-many). A community matched by
/// several fronts is reported in the earliest-created one.
std::vector<DynamicCommunity> greene_track(std::span<const Partition> partitions, const BaselineConfig& cfg);
std::vector<BaselineLink> greene_links(std::span<const Partition> partitions, const BaselineConfig& cfg);

/// Takaffoli: |a ∩ b| / max(|a|, |b|), 0 below k; all snapshot pairs.
double takaffoli_similarity(std::span<const NodeId> a, std::span<const NodeId> b, double k);
std::vector<BaselineLink> takaffoli_links(std::span<const Partition> partitions, const BaselineConfig& cfg);
std::vector<DynamicCommunity> takaffoli_track(std::span<const Partition> partitions, const BaselineConfig& cfg);

/// GED inclusion I(a, b) with node importance = weighted degree inside a's
/// induced subgraph of `g`. Falls back to uniform importance when a has no
/// internal edges.
double ged_inclusion(std::span<const NodeId> a, std::span<const NodeId> b, const Graph& g);
std::vector<BaselineLink> ged_links(std::span<const Partition> partitions, const SnapshotSeries& series,
                                    const BaselineConfig& cfg);
std::vector<DynamicCommunity> ged_track(std::span<const Partition> partitions, const SnapshotSeries& series,
                                        const BaselineConfig& cfg);

/// Tajeuna: transition vectors p[a][x] = |a ∩ C_x| / |a| over communities of
/// other snapshots; similarity = sum 2 p_a p_b / (p_a + p_b), 0 unless > k.
/// Vectors are sparse (x, p) lists sorted by x, where x indexes communities in
/// (snapshot, community) order.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;
std::vector<SparseVector> tajeuna_vectors(std::span<const Partition> partitions);
double tajeuna_similarity(const SparseVector& pa, const SparseVector& pb);
std::vector<BaselineLink> tajeuna_links(std::span<const Partition> partitions, const BaselineConfig& cfg);
std::vector<DynamicCommunity> tajeuna_track(std::span<const Partition> partitions, const BaselineConfig& cfg);

/// ICEM: member -> (snapshot, community) index; links a (earlier) and b when
/// |a ∩ b|/|a| > k and |a ∩ b|/|b| > k; strong when |a ∩ b|/|a| > v.
std::vector<BaselineLink> icem_links(std::span<const Partition> partitions, const BaselineConfig& cfg);
std::vector<DynamicCommunity> icem_track(std::span<const Partition> partitions, const BaselineConfig& cfg);

/// Connected components of `links` over every community of `partitions`.
std::vector<DynamicCommunity> components_of(std::span<const Partition> partitions,
                                            std::span<const BaselineLink> links);

/// DynamicTracker adapter. GED needs the snapshot graphs; the series must
/// outlive the tracker.
class BaselineTracker final : public DynamicTracker {
 public:
  explicit BaselineTracker(BaselineConfig cfg, const SnapshotSeries* series = nullptr);
  std::string name() const override;
  std::vector<DynamicCommunity> track(std::span<const Partition> partitions) const override;
  const BaselineConfig& config() const { return cfg_; }

 private:
  BaselineConfig cfg_;
  const SnapshotSeries* series_;
};

}  // namespace commtrack
