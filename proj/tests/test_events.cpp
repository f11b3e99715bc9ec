#include <nlohmann/json.hpp>
#include <sstream>

#include "commtrack/events.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace commtrack;
using namespace testsupport;

namespace {

std::vector<std::pair<EventKind, CommunityRef>> kinds(const std::vector<EventRecord>& events) {
  std::vector<std::pair<EventKind, CommunityRef>> out;
  for (const auto& e : events) out.push_back({e.kind, e.subject});
  return out;
}

bool has(const std::vector<EventRecord>& events, EventKind k, CommunityRef subject) {
  return std::any_of(events.begin(), events.end(), [&](const auto& e) { return e.kind == k && e.subject == subject; });
}

// Random dynamic community: a random subset of the refs of a random series.
std::pair<PartitionSeries, std::vector<CommunityRef>> random_dynamic(Rng& rng) {
  auto parts = random_partitions(rng, 2 + rng.below(6), 8 + rng.below(30), 1 + rng.below(9));
  std::vector<CommunityRef> all;
  for (std::uint32_t t = 0; t < parts.size(); ++t)
    for (std::uint32_t c = 0; c < parts[t].size(); ++c) all.push_back({t, c});
  rng.shuffle(all);
  all.resize(1 + rng.below(std::min<std::size_t>(all.size(), 50)));
  return {parts, all};
}

}  // namespace

TEST_CASE("event kind names") {
  for (auto k : {EventKind::growth, EventKind::contraction, EventKind::merging, EventKind::splitting, EventKind::birth,
                 EventKind::death}) {
    CHECK(parse_event_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_event_kind("explosion").has_value());
}

TEST_CASE("singleton dynamic community has exactly birth and death") {
  PartitionSeries parts(1);
  parts[0].communities = {{1, 2}};
  auto ev = reconstruct(dynamic_of({{0, 0}}, parts), parts);
  CHECK(kinds(ev) == std::vector<std::pair<EventKind, CommunityRef>>{{EventKind::birth, {0, 0}},
                                                                      {EventKind::death, {0, 0}}});
}

TEST_CASE("contraction by one member") {
  PartitionSeries parts(2);
  parts[0].communities = {{1, 2, 3}};
  parts[1].communities = {{1, 2}};
  auto ev = reconstruct(dynamic_of({{0, 0}, {1, 0}}, parts), parts);
  CHECK(has(ev, EventKind::contraction, {1, 0}));
  CHECK_FALSE(has(ev, EventKind::growth, {1, 0}));
  CHECK(has(ev, EventKind::birth, {0, 0}));
  CHECK(has(ev, EventKind::death, {1, 0}));
  CHECK(ev.size() == 3);
}

TEST_CASE("equal-size continuation is neither growth nor contraction") {
  PartitionSeries parts(2);
  parts[0].communities = {{1, 2, 3}};
  parts[1].communities = {{2, 3, 4}};
  auto ev = reconstruct(dynamic_of({{0, 0}, {1, 0}}, parts), parts);
  CHECK(ev.size() == 2);
}

TEST_CASE("merge of two snapshot-3 communities at snapshot 4") {
  PartitionSeries parts(4);
  parts[2].communities = {{1, 2}, {3, 4}};
  parts[3].communities = {{1, 2, 3, 4}};
  auto d = dynamic_of({{2, 0}, {2, 1}, {3, 0}}, parts);
  auto ev = reconstruct(d, parts);
  auto it = std::find_if(ev.begin(), ev.end(), [](const auto& e) { return e.kind == EventKind::merging; });
  REQUIRE(it != ev.end());
  CHECK(it->subject == CommunityRef{3, 0});
  CHECK(it->related == std::vector<CommunityRef>{{2, 0}, {2, 1}});
  auto sets = merge_split_sets(d, {3, 0}, parts);
  REQUIRE(sets.merging.size() == 1);
  CHECK(sets.merging[0].snapshot == 2);
  CHECK(sets.merging[0].communities.size() == 2);
  // Growth co-occurs.
  CHECK(has(ev, EventKind::growth, {3, 0}));
}

TEST_CASE("split of one snapshot-4 community at snapshot 5") {
  PartitionSeries parts(5);
  parts[3].communities = {{1, 2, 3, 4}};
  parts[4].communities = {{1, 2}, {3, 4}};
  auto d = dynamic_of({{3, 0}, {4, 0}, {4, 1}}, parts);
  auto ev = reconstruct(d, parts);
  for (std::uint32_t c : {0u, 1u}) {
    auto it = std::find_if(ev.begin(), ev.end(), [&](const auto& e) {
      return e.kind == EventKind::splitting && e.subject == CommunityRef{4, c};
    });
    REQUIRE(it != ev.end());
    CHECK(it->related == std::vector<CommunityRef>{{4, 0}, {4, 1}});
  }
  auto sets = merge_split_sets(d, {4, 1}, parts);
  REQUIRE(sets.splitting.size() == 1);
  CHECK(sets.splitting[0].parent == CommunityRef{3, 0});
}

TEST_CASE("no overlap means no merge or split sets") {
  PartitionSeries parts(2);
  parts[0].communities = {{1}, {2}};
  parts[1].communities = {{3}, {4}};
  auto d = dynamic_of({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, parts);
  auto sets = merge_split_sets(d, {1, 0}, parts);
  CHECK(sets.merging.empty());
  CHECK(sets.splitting.empty());
  auto ev = reconstruct(d, parts);
  CHECK(ev.size() == 8);  // every ref is born and dies
}

TEST_CASE("schematic D1: growth at 2, death at 4") {
  auto f = schematic_fixture();
  std::vector<CommunityRef> d1;
  for (std::uint32_t t = 0; t < 5; ++t)
    for (std::uint32_t c = 0; c < f.parts[t].size(); ++c)
      if (f.lineage[t][c] == 1) d1.push_back({t, c});
  auto ev = reconstruct(dynamic_of(d1, f.parts), f.parts);
  CHECK(kinds(ev) == std::vector<std::pair<EventKind, CommunityRef>>{{EventKind::birth, {0, 0}},
                                                                      {EventKind::growth, {1, 0}},
                                                                      {EventKind::death, {3, 0}}});
}

TEST_CASE("merging considers every earlier snapshot, reporting the latest set") {
  PartitionSeries parts(3);
  parts[0].communities = {{1}, {2}};
  parts[1].communities = {{3}, {4}};
  parts[2].communities = {{1, 2, 3, 4}};
  auto ev = reconstruct(dynamic_of({{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 0}}, parts), parts);
  auto it = std::find_if(ev.begin(), ev.end(), [](const auto& e) { return e.kind == EventKind::merging; });
  REQUIRE(it != ev.end());
  CHECK(it->related == std::vector<CommunityRef>{{1, 0}, {1, 1}});
}

TEST_CASE("property: reconstruct equals the literal predicate oracle") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    auto [parts, refs] = random_dynamic(rng);
    auto d = dynamic_of(refs, parts, 7);
    auto ev = reconstruct(d, parts);
    CHECK(as_oracle_events(ev) == events_oracle(refs, parts));
    for (const auto& e : ev) CHECK(e.dyncomm == 7);
  }
}

TEST_CASE("property: invariant to timeline storage order") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    auto [parts, refs] = random_dynamic(rng);
    auto d = dynamic_of(refs, parts);
    auto shuffled = d;
    rng.shuffle(shuffled.timeline);
    CHECK(as_oracle_events(reconstruct(d, parts)) == as_oracle_events(reconstruct(shuffled, parts)));
  }
}

// The literal predicates give a static community a birth only when nothing
// earlier in D overlaps it, so "exactly one birth per community" cannot hold
// for continuations. What does hold: at most one birth and one death per
// subject, and the earliest and latest refs always carry them.
TEST_CASE("property: birth and death bookkeeping") {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    auto [parts, refs] = random_dynamic(rng);
    auto d = dynamic_of(refs, parts);
    auto ev = reconstruct(d, parts);
    std::map<CommunityRef, int> births, deaths;
    for (const auto& e : ev) {
      if (e.kind == EventKind::birth) ++births[e.subject];
      if (e.kind == EventKind::death) ++deaths[e.subject];
      if (e.kind == EventKind::merging || e.kind == EventKind::splitting) CHECK(e.related.size() >= 2);
      for (auto r : e.related) CHECK(std::binary_search(d.timeline.begin(), d.timeline.end(), r));
    }
    for (auto& [r, n] : births) CHECK(n == 1);
    for (auto& [r, n] : deaths) CHECK(n == 1);
    for (auto r : d.timeline) {
      if (r.snapshot == d.first_snapshot) CHECK(births.count(r));
      if (r.snapshot == d.last_snapshot) CHECK(deaths.count(r));
    }
  }
}

TEST_CASE("reconstruct_all and JSON lines") {
  auto f = schematic_fixture();
  std::vector<DynamicCommunity> ds;
  ds.push_back(dynamic_of({{0, 0}, {1, 0}}, f.parts, 0));
  ds.push_back(dynamic_of({{4, 0}, {4, 1}, {3, 2}}, f.parts, 1));
  auto all = reconstruct_all(ds, f.parts);
  std::ostringstream out;
  write_events_jsonl(out, all);
  std::istringstream in(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("dyncomm"));
    CHECK(j.contains("kind"));
    CHECK(j["snapshot"].get<int>() >= 1);
    CHECK(j["related"].is_array());
    ++n;
  }
  CHECK(n == all.size());
}
