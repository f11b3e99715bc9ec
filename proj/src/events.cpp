#include "commtrack/events.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

namespace commtrack {
namespace {

constexpr std::array<std::string_view, 6> kKindNames{"growth", "contraction", "merging",
                                                     "splitting", "birth", "death"};

// Pairwise "shares members" relation among the constituents of one dynamic
// community, indexed by timeline position.
class OverlapTable {
 public:
  OverlapTable(const DynamicCommunity& d, std::span<const Partition> partitions) : refs_(d.timeline) {
    std::sort(refs_.begin(), refs_.end());
    refs_.erase(std::unique(refs_.begin(), refs_.end()), refs_.end());
    const std::size_t n = refs_.size();
    sizes_.resize(n);
    overlaps_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = members(partitions, refs_[i]);
      sizes_[i] = a.size();
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool shared = intersection_size(a, members(partitions, refs_[j])) > 0;
        overlaps_[i * n + j] = overlaps_[j * n + i] = shared;
      }
    }
  }

  std::size_t size() const { return refs_.size(); }
  const CommunityRef& ref(std::size_t i) const { return refs_[i]; }
  std::size_t community_size(std::size_t i) const { return sizes_[i]; }
  bool overlap(std::size_t i, std::size_t j) const { return overlaps_[i * refs_.size() + j] != 0; }

  std::size_t position(CommunityRef ref) const {
    auto it = std::lower_bound(refs_.begin(), refs_.end(), ref);
    if (it == refs_.end() || *it != ref) throw Error("subject is not part of the dynamic community");
    return static_cast<std::size_t>(it - refs_.begin());
  }

 private:
  static const std::vector<NodeId>& members(std::span<const Partition> partitions, CommunityRef ref) {
    if (ref.snapshot >= partitions.size() || ref.community >= partitions[ref.snapshot].size()) {
      throw Error("community reference outside the partitions");
    }
    return partitions[ref.snapshot].communities[ref.community];
  }

  std::vector<CommunityRef> refs_;
  std::vector<std::size_t> sizes_;
  std::vector<char> overlaps_;
};

MergeSplitSets merge_split_sets(const OverlapTable& t, std::size_t s) {
  MergeSplitSets out;
  const auto snap = t.ref(s).snapshot;
  std::map<std::uint32_t, std::vector<CommunityRef>> by_snapshot;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t.ref(j).snapshot < snap && t.overlap(s, j)) by_snapshot[t.ref(j).snapshot].push_back(t.ref(j));
  }
  for (auto& [js, set] : by_snapshot) out.merging.push_back({js, std::move(set)});

  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t.ref(j).snapshot >= snap || !t.overlap(s, j)) continue;
    MergeSplitSets::SplitEntry entry{t.ref(j), {}};
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t.ref(k).snapshot == snap && t.overlap(k, j)) entry.siblings.push_back(t.ref(k));
    }
    out.splitting.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

std::string_view to_string(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

MergeSplitSets merge_split_sets(const DynamicCommunity& d, CommunityRef subject, std::span<const Partition> partitions) {
  OverlapTable table(d, partitions);
  return merge_split_sets(table, table.position(subject));
}

std::vector<EventRecord> reconstruct(const DynamicCommunity& d, std::span<const Partition> partitions) {
  OverlapTable t(d, partitions);
  std::vector<EventRecord> events;
  auto emit = [&](EventKind kind, std::size_t s, std::vector<CommunityRef> related) {
    events.push_back({kind, t.ref(s), std::move(related), d.id});
  };

  for (std::size_t s = 0; s < t.size(); ++s) {
    const auto snap = t.ref(s).snapshot;
    std::vector<CommunityRef> smaller, larger;
    bool has_earlier = false, has_later = false;
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j == s || !t.overlap(s, j)) continue;
      if (t.ref(j).snapshot > snap) has_later = true;
      if (t.ref(j).snapshot >= snap) continue;
      has_earlier = true;
      if (t.community_size(j) < t.community_size(s)) smaller.push_back(t.ref(j));
      if (t.community_size(j) > t.community_size(s)) larger.push_back(t.ref(j));
    }
    if (!smaller.empty()) emit(EventKind::growth, s, std::move(smaller));
    if (!larger.empty()) emit(EventKind::contraction, s, std::move(larger));

    auto sets = merge_split_sets(t, s);
    // Report the most recent qualifying set.
    for (auto it = sets.merging.rbegin(); it != sets.merging.rend(); ++it) {
      if (it->communities.size() >= 2) {
        emit(EventKind::merging, s, std::move(it->communities));
        break;
      }
    }
    for (auto it = sets.splitting.rbegin(); it != sets.splitting.rend(); ++it) {
      if (it->siblings.size() >= 2) {
        emit(EventKind::splitting, s, std::move(it->siblings));
        break;
      }
    }
    if (!has_earlier) emit(EventKind::birth, s, {});
    if (!has_later) emit(EventKind::death, s, {});
  }
  std::sort(events.begin(), events.end(), [](const EventRecord& a, const EventRecord& b) {
    return a.subject != b.subject ? a.subject < b.subject : a.kind < b.kind;
  });
  return events;
}

std::vector<EventRecord> reconstruct_all(std::span<const DynamicCommunity> communities,
                                         std::span<const Partition> partitions) {
  std::vector<EventRecord> out;
  for (const auto& d : communities) {
    auto events = reconstruct(d, partitions);
    out.insert(out.end(), std::make_move_iterator(events.begin()), std::make_move_iterator(events.end()));
  }
  return out;
}

void write_events_jsonl(std::ostream& out, std::span<const EventRecord> events) {
  for (const auto& e : events) {
    nlohmann::json related = nlohmann::json::array();
    for (const auto& r : e.related) related.push_back({{"snapshot", r.snapshot + 1}, {"community", r.community}});
    nlohmann::json line = {{"dyncomm", e.dyncomm},
                           {"kind", to_string(e.kind)},
                           {"snapshot", e.subject.snapshot + 1},
                           {"community", e.subject.community},
                           {"related", std::move(related)}};
    out << line.dump() << '\n';
  }
}

}  // namespace commtrack
