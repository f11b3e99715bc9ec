#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "commtrack/graph.hpp"
#include "commtrack/simnet.hpp"
#include "commtrack/tracker.hpp"

namespace commtrack {

enum class EventKind { growth, contraction, merging, splitting, birth, death };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

/// One critical event of a static community inside a dynamic community.
/// `related` holds the earlier communities behind growth/contraction/merging,
/// the sibling set (subject included) for splitting, and nothing for
/// birth/death.
struct EventRecord {
  EventKind kind;
  CommunityRef subject;
  std::vector<CommunityRef> related;
  std::uint32_t dyncomm = 0;
};

/// Maximal merge / split sets of one subject, one entry per earlier snapshot
/// that yields a nonempty set. A merging or splitting event exists when some
/// entry has two or more communities.
struct MergeSplitSets {
  struct MergeEntry {
    std::uint32_t snapshot;  // the earlier snapshot j
    std::vector<CommunityRef> communities;
  };
  struct SplitEntry {
    CommunityRef parent;  // earlier C^j sharing members with the subject
    std::vector<CommunityRef> siblings;
  };
  /// Per earlier snapshot j: communities of D at j sharing members with the
  /// subject.
  std::vector<MergeEntry> merging;
  /// Per earlier C^j of D sharing members with the subject: communities of D
  /// at the subject's snapshot sharing members with C^j (subject included).
  std::vector<SplitEntry> splitting;
};

MergeSplitSets merge_split_sets(const DynamicCommunity& d, CommunityRef subject, std::span<const Partition> partitions);

/// Every event whose predicate holds for some constituent of `d`. Several
/// kinds may hold for the same subject. Output is sorted by (subject, kind).
std::vector<EventRecord> reconstruct(const DynamicCommunity& d, std::span<const Partition> partitions);

std::vector<EventRecord> reconstruct_all(std::span<const DynamicCommunity> communities,
                                         std::span<const Partition> partitions);

/// One JSON object per line: dyncomm, kind, snapshot, community, related.
void write_events_jsonl(std::ostream& out, std::span<const EventRecord> events);

}  // namespace commtrack
