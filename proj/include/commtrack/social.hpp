#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "commtrack/graph.hpp"
#include "commtrack/tracker.hpp"

namespace commtrack {

struct TweetRecord {
  std::string user;
  /// Days since 1970-01-01, UTC.
  std::int64_t day = 0;
  /// Case-folded, '#' stripped, sorted, unique.
  std::vector<std::string> hashtags;
};

/// Days since the epoch of an ISO-8601 date or date-time, shifted to UTC when
/// an offset is given. Returns nullopt when unparseable.
std::optional<std::int64_t> parse_utc_day(std::string_view text);
std::string format_day(std::int64_t day);

/// Normalizes a raw tag list (comma separated).
std::vector<std::string> normalize_hashtags(std::string_view raw);

/// `user<TAB>timestamp<TAB>tag1,tag2` lines; blank and '#'-prefixed lines are
/// skipped. Errors name the 1-based record line.
std::vector<TweetRecord> read_tweets(std::istream& in);

struct CohashtagSeries {
  SnapshotSeries series;  // node labels are user ids, snapshot labels ISO dates
  std::vector<std::int64_t> days;
  /// usage[t][user] = tag -> number of records using it that day.
  std::vector<std::map<NodeId, std::map<std::string, std::size_t>>> usage;
};

/// One snapshot per UTC day with at least one edge; edge weight is the number
/// of hashtags both users used that day.
CohashtagSeries build_cohashtag_series(std::span<const TweetRecord> tweets);

/// |h1 ∩ h2| / min(|h1|, |h2|) on sorted tag sets. Throws on an empty set.
double hashtags_overlap(std::span<const std::string> h1, std::span<const std::string> h2);

struct HashtagProfile {
  std::vector<std::string> tags;  // sorted
  std::vector<std::pair<std::string, std::size_t>> top;  // by count desc, then tag
};

/// profiles[t][c] for community c of partitions[t].
using ProfileTable = std::vector<std::vector<HashtagProfile>>;
ProfileTable hashtag_profiles(const CohashtagSeries& data, std::span<const Partition> partitions,
                              std::size_t top_k = 10);

/// Mean overlap over all unordered pairs of constituents; nullopt for a
/// single constituent. Throws when a constituent has no hashtags.
std::optional<double> average_hashtags_overlap(const DynamicCommunity& d, const ProfileTable& profiles);

struct SummaryRow {
  std::uint32_t dyncomm;
  std::size_t members;
  std::size_t days;
  std::optional<double> avg_overlap;
};

std::vector<SummaryRow> community_summary(std::span<const DynamicCommunity> communities,
                                          const ProfileTable& profiles);
/// `dyncomm,members,days,avg_overlap` (empty cell when undefined).
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
/// `snapshot,date,community,rank,tag,count`.
void write_top_hashtags_csv(std::ostream& out, const CohashtagSeries& data, const ProfileTable& profiles);

}  // namespace commtrack
