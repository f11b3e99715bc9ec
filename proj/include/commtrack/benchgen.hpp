#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "commtrack/events.hpp"
#include "commtrack/graph.hpp"
#include "commtrack/tracker.hpp"

namespace commtrack {

enum class Regime { birthdeath, expandcontract, mergesplit, intermittent };

std::string_view to_string(Regime regime);
std::optional<Regime> parse_regime(std::string_view name);

struct BenchConfig {
  std::size_t nodes = 15000;
  std::size_t snapshots = 5;
  double avg_degree = 20.0;
  std::size_t max_degree = 40;
  double mixing = 0.2;
  double churn = 0.2;
  Regime regime = Regime::birthdeath;
  /// Communities affected per snapshot (births, resizes, splits and merges).
  std::size_t event_count = 40;
  std::uint64_t seed = 42;

  double degree_exponent = 2.0;
  double size_exponent = 1.0;
  std::size_t min_community = 20;
  std::size_t max_community = 100;
  /// Intermittent regime: share of communities hidden per snapshot.
  double hidden_fraction = 0.1;
  /// Expand/contract step.
  double resize_fraction = 0.25;

  void validate() const;
};

/// Expected number of communities implied by the size distribution.
double expected_community_count(const BenchConfig& cfg);

/// Shrinks a config to `nodes` vertices. The community-size ceiling is capped
/// at 50 and event_count is scaled by the change in expected community count.
/// Returns cfg unchanged when nodes == cfg.nodes.
BenchConfig desk_scale(const BenchConfig& cfg, std::size_t nodes = 1000);

struct GroundTruth {
  PartitionSeries partitions;
  /// labels[t][c]: dynamic label of community c of snapshot t.
  std::vector<std::vector<std::uint32_t>> labels;
  /// Planted events; `dyncomm` holds the subject's label.
  std::vector<EventRecord> events;

  std::uint32_t label_count() const;
  /// Refs carrying `label`, in snapshot order.
  std::vector<CommunityRef> timeline(std::uint32_t label) const;
  /// One DynamicCommunity per label (renumbered like tracker output).
  std::vector<DynamicCommunity> dynamic_communities() const;
};

struct Benchmark {
  SnapshotSeries series;
  GroundTruth truth;
};

Benchmark generate(const BenchConfig& cfg);

/// `dyncomm snapshot community` rows keyed by planted labels.
void write_truth_labels(std::ostream& out, const GroundTruth& truth);

}  // namespace commtrack
