#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commtrack/benchgen.hpp"
#include "commtrack/graph.hpp"
#include "commtrack/simnet.hpp"
#include "commtrack/tracker.hpp"

namespace commtrack {

/// Dynamic-community label per (node, snapshot) key. Keys are sorted and
/// unique; labels are dense in first-seen order.
struct LabelAssignment {
  std::vector<std::uint64_t> keys;  // snapshot << 32 | node
  std::vector<std::uint32_t> labels;

  static std::uint64_t key(NodeId node, std::uint32_t snapshot) {
    return (static_cast<std::uint64_t>(snapshot) << 32) | node;
  }
  std::size_t size() const { return keys.size(); }
};

/// Builds a LabelAssignment from raw (key, label) pairs. Throws on a repeated
/// key.
LabelAssignment make_assignment(std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs);

/// Labels every node present in snapshots [0, prefix) of `series`. Nodes
/// outside every tracked community share one reserved label.
LabelAssignment label_assignment(const SnapshotSeries& series, std::span<const Partition> partitions,
                                 std::span<const DynamicCommunity> communities, std::size_t prefix);

/// Normalized mutual information in nats; 1 when both entropies vanish.
/// Throws Error when the key sets differ.
double nmi(const LabelAssignment& x, const LabelAssignment& y);

/// Distinct dynamic communities with a constituent in each snapshot.
std::vector<std::size_t> active_counts(std::span<const DynamicCommunity> communities, std::size_t snapshots);

/// Louvain partition of every snapshot, seed detector_seed + t, at the level
/// closest to `target_count` communities. Edgeless snapshots get an empty
/// partition.
PartitionSeries detect_series(const SnapshotSeries& series, std::uint64_t detector_seed, std::size_t target_count);

struct StageTimings {
  double similarity_seconds = 0.0;
  double tracking_seconds = 0.0;
  double total_seconds = 0.0;
  std::size_t communities = 0;
  std::size_t similarity_edges = 0;
};

struct ExperimentReport {
  std::string tracker;
  std::uint64_t detector_seed = 0;
  /// nmi[L - 1] for prefix length L.
  std::vector<double> nmi;
  /// Active dynamic communities per snapshot: tracker on detected partitions,
  /// tracker on truth partitions, and the ground truth.
  std::vector<std::size_t> found;
  std::vector<std::size_t> found_on_truth;
  std::vector<std::size_t> truth;
  std::optional<StageTimings> timings;
};

/// Dual-scenario protocol: for every prefix length L, track the truth
/// partitions and the detected partitions of snapshots [0, L) and compare the
/// resulting (node, snapshot) labelings by NMI. `truth_counts` supplies the
/// per-snapshot ground-truth dynamic-community counts; when absent the counts
/// of the tracker on truth partitions are reported instead.
ExperimentReport run_protocol(const SnapshotSeries& series, const PartitionSeries& truth,
                              const DynamicTracker& tracker, std::uint64_t detector_seed,
                              const std::vector<std::size_t>* truth_counts = nullptr,
                              const PartitionSeries* detected = nullptr);
ExperimentReport run_protocol(const SnapshotSeries& series, const GroundTruth& truth, const DynamicTracker& tracker,
                              std::uint64_t detector_seed);

/// Distinct planted labels per snapshot.
std::vector<std::size_t> truth_counts(const GroundTruth& truth);

/// Wall-clock of similarity-network construction and tracking, best of
/// `repetitions` runs.
StageTimings time_stages(std::span<const Partition> partitions, std::uint64_t seed,
                         SimilarityMetric metric = SimilarityMetric::overlap, unsigned threads = 1,
                         std::size_t repetitions = 1);

void write_nmi_csv(std::ostream& out, const ExperimentReport& report);
void write_counts_csv(std::ostream& out, const ExperimentReport& report);
void write_timings_csv(std::ostream& out, const StageTimings& timings);
/// Combined report, including a short machine description.
std::string report_json(const ExperimentReport& report);

}  // namespace commtrack
