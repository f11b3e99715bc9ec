#pragma once
// Generators, brute-force oracles and fixtures shared by the test binaries.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "commtrack/events.hpp"
#include "commtrack/graph.hpp"
#include "commtrack/rng.hpp"
#include "commtrack/simnet.hpp"
#include "commtrack/tracker.hpp"

namespace testsupport {

using namespace commtrack;

inline std::vector<NodeId> range(NodeId a, NodeId b) {
  std::vector<NodeId> v(b - a);
  std::iota(v.begin(), v.end(), a);
  return v;
}

inline std::vector<NodeId> join(std::vector<NodeId> a, const std::vector<NodeId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Erdos-Renyi style weighted graph; weights in (0, 3].
inline Graph random_graph(Rng& rng, std::size_t n, double p, bool loops = false) {
  GraphBuilder b(n, loops);
  for (NodeId v = 0; v < n; ++v) b.add_vertex(v);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform() < p) b.add_edge(u, v, 0.25 + rng.below(12) * 0.25);
    }
  }
  if (loops) {
    for (NodeId v = 0; v < n; ++v) {
      if (rng.uniform() < 0.2) b.add_self_loop(v, 1.0 + rng.below(4));
    }
  }
  return b.build();
}

// Modularity evaluated literally as a double sum over ordered vertex pairs, in
// long double. labels[v] is the community of v.
inline long double modularity_oracle(const Graph& g, const std::vector<std::uint32_t>& labels) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n, 0.0L));
  std::vector<long double> k(n, 0.0L);
  for (NodeId x = 0; x < n; ++x) {
    a[x][x] = g.self_loop(x);
    for (const auto& nb : g.neighbors(x)) a[x][nb.vertex] = nb.weight;
  }
  long double two_m = 0.0L;
  for (NodeId x = 0; x < n; ++x) {
    k[x] = std::accumulate(a[x].begin(), a[x].end(), 0.0L);
    two_m += k[x];
  }
  long double q = 0.0L;
  for (NodeId x = 0; x < n; ++x) {
    for (NodeId y = 0; y < n; ++y) {
      if (labels[x] == labels[y]) q += a[x][y] - k[x] * k[y] / two_m;
    }
  }
  return q / two_m;
}

inline std::vector<std::uint32_t> labels_of(const Partition& p, std::size_t n) {
  std::vector<std::uint32_t> labels(n);
  std::iota(labels.begin(), labels.end(), static_cast<std::uint32_t>(p.size()));
  for (std::uint32_t c = 0; c < p.size(); ++c) {
    for (NodeId v : p.communities[c]) labels[v] = c;
  }
  return labels;
}

// Calls f(labels) for every set partition of {0..n-1} (restricted growth
// strings).
template <class F>
void for_each_set_partition(std::size_t n, F&& f) {
  std::vector<std::uint32_t> a(n, 0), maxv(n, 0);
  if (n == 0) return;
  while (true) {
    f(a);
    std::size_t i = n - 1;
    while (i > 0 && a[i] == maxv[i - 1] + 1) --i;
    if (i == 0) return;
    ++a[i];
    for (std::size_t j = i; j < n; ++j) {
      if (j > i) a[j] = 0;
      maxv[j] = std::max(maxv[j - 1], a[j]);
    }
  }
}

// Random partition series over a node universe of `universe` ids. Each
// snapshot covers a random subset split into random communities.
inline PartitionSeries random_partitions(Rng& rng, std::size_t snapshots, std::size_t universe,
                                         std::size_t max_communities) {
  PartitionSeries out(snapshots);
  for (auto& p : out) {
    const std::size_t k = 1 + rng.below(max_communities);
    std::vector<std::vector<NodeId>> comms(k);
    for (NodeId v = 0; v < universe; ++v) {
      if (rng.uniform() < 0.7) comms[rng.below(k)].push_back(v);
    }
    for (auto& c : comms) {
      if (!c.empty()) p.communities.push_back(std::move(c));
    }
    if (p.communities.empty()) p.communities.push_back({static_cast<NodeId>(rng.below(universe))});
  }
  return out;
}

inline SnapshotSeries series_for(const PartitionSeries& parts) {
  NodeId n = 0;
  for (const auto& p : parts)
    for (const auto& c : p.communities)
      for (NodeId v : c) n = std::max(n, v + 1);
  SnapshotSeries s;
  for (NodeId v = 0; v < n; ++v) s.nodes.intern(std::to_string(v));
  for (std::size_t t = 0; t < parts.size(); ++t) {
    GraphBuilder b(n);
    for (const auto& c : parts[t].communities) {
      for (NodeId v : c) b.add_vertex(v);
      for (std::size_t i = 0; i + 1 < c.size(); ++i) b.add_edge(c[i], c[i + 1], 1.0);
    }
    s.snapshots.push_back({b.build(), std::to_string(t + 1)});
  }
  return s;
}

using EdgeKey = std::tuple<CommunityRef, CommunityRef>;

// Quadratic oracle for the similarity network: every pair of communities from
// distinct snapshots, intersection by std::set_intersection.
inline std::map<EdgeKey, double> similarity_oracle(const PartitionSeries& parts, SimilarityMetric metric) {
  std::map<EdgeKey, double> out;
  for (std::uint32_t i = 0; i < parts.size(); ++i) {
    for (std::uint32_t j = i + 1; j < parts.size(); ++j) {
      for (std::uint32_t a = 0; a < parts[i].size(); ++a) {
        for (std::uint32_t b = 0; b < parts[j].size(); ++b) {
          const auto& x = parts[i].communities[a];
          const auto& y = parts[j].communities[b];
          std::vector<NodeId> both;
          std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
          if (both.empty()) continue;
          const double inter = static_cast<double>(both.size());
          const double w = metric == SimilarityMetric::overlap
                               ? inter / static_cast<double>(std::min(x.size(), y.size()))
                               : inter / static_cast<double>(x.size() + y.size() - both.size());
          out[{CommunityRef{i, a}, CommunityRef{j, b}}] = w;
        }
      }
    }
  }
  return out;
}

// Literal evaluation of the six event predicates over the refs of d.
// Merging reports the maximal set at the latest qualifying earlier snapshot;
// splitting reports the siblings of the latest qualifying parent.
struct OracleEvent {
  EventKind kind;
  CommunityRef subject;
  std::vector<CommunityRef> related;
  auto operator<=>(const OracleEvent&) const = default;
};

inline std::vector<OracleEvent> events_oracle(const std::vector<CommunityRef>& refs, const PartitionSeries& parts) {
  auto members = [&](CommunityRef r) -> const std::vector<NodeId>& {
    return parts[r.snapshot].communities[r.community];
  };
  auto overlaps = [&](CommunityRef a, CommunityRef b) {
    const auto& x = members(a);
    const auto& y = members(b);
    for (NodeId v : x)
      if (std::binary_search(y.begin(), y.end(), v)) return true;
    return false;
  };
  std::vector<OracleEvent> out;
  for (CommunityRef ci : refs) {
    const std::size_t size_i = members(ci).size();
    std::vector<CommunityRef> smaller, larger;
    bool earlier = false, later = false;
    std::map<std::uint32_t, std::vector<CommunityRef>> merge_sets;
    std::map<CommunityRef, std::vector<CommunityRef>> split_sets;
    for (CommunityRef cj : refs) {
      if (cj == ci || !overlaps(ci, cj)) continue;
      if (cj.snapshot > ci.snapshot) later = true;
      if (cj.snapshot >= ci.snapshot) continue;
      earlier = true;
      if (members(cj).size() < size_i) smaller.push_back(cj);
      if (members(cj).size() > size_i) larger.push_back(cj);
      merge_sets[cj.snapshot].push_back(cj);
      for (CommunityRef ck : refs) {
        if (ck.snapshot == ci.snapshot && overlaps(ck, cj)) split_sets[cj].push_back(ck);
      }
    }
    std::sort(smaller.begin(), smaller.end());
    std::sort(larger.begin(), larger.end());
    if (!smaller.empty()) out.push_back({EventKind::growth, ci, smaller});
    if (!larger.empty()) out.push_back({EventKind::contraction, ci, larger});
    for (auto it = merge_sets.rbegin(); it != merge_sets.rend(); ++it) {
      if (it->second.size() >= 2) {
        std::sort(it->second.begin(), it->second.end());
        out.push_back({EventKind::merging, ci, it->second});
        break;
      }
    }
    for (auto it = split_sets.rbegin(); it != split_sets.rend(); ++it) {
      if (it->second.size() >= 2) {
        std::sort(it->second.begin(), it->second.end());
        out.push_back({EventKind::splitting, ci, it->second});
        break;
      }
    }
    if (!earlier) out.push_back({EventKind::birth, ci, {}});
    if (!later) out.push_back({EventKind::death, ci, {}});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<OracleEvent> as_oracle_events(const std::vector<EventRecord>& events) {
  std::vector<OracleEvent> out;
  for (const auto& e : events) {
    auto related = e.related;
    std::sort(related.begin(), related.end());
    out.push_back({e.kind, e.subject, related});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline DynamicCommunity dynamic_of(std::vector<CommunityRef> refs, const PartitionSeries& parts, std::uint32_t id = 0) {
  DynamicCommunity d;
  d.id = id;
  std::sort(refs.begin(), refs.end());
  d.timeline = refs;
  d.first_snapshot = refs.front().snapshot;
  d.last_snapshot = refs.back().snapshot;
  for (auto r : refs) d.nodes = join(d.nodes, parts[r.snapshot].communities[r.community]);
  return d;
}

// Five snapshots realising the five timelines of the schematic:
//   D1: grows at 2, dies at 4.
//   D2: seen at 1 and 3; D3 born at 2; D3 merges into D2's line at 4.
//   D4: contracts at 3, splits at 5 into D4 and the newborn D5.
// `lineage[t][c]` names the narrated timeline (1..5) of each community.
struct SchematicFixture {
  PartitionSeries parts;
  std::vector<std::vector<int>> lineage;
};

inline SchematicFixture schematic_fixture() {
  SchematicFixture f;
  f.parts.resize(5);
  f.lineage.resize(5);
  auto put = [&](std::uint32_t t, std::vector<NodeId> members, int line) {
    f.parts[t].communities.push_back(std::move(members));
    f.lineage[t].push_back(line);
  };
  put(0, range(0, 5), 1);
  put(1, range(0, 30), 1);
  put(2, range(5, 35), 1);
  put(3, range(5, 35), 1);

  put(0, range(100, 120), 2);
  put(1, range(200, 220), 3);
  put(2, range(110, 130), 2);
  put(2, range(210, 230), 3);
  put(3, join(range(110, 120), range(210, 220)), 2);
  put(4, join(range(110, 120), range(200, 210)), 2);

  put(0, range(300, 330), 4);
  put(1, range(300, 330), 4);
  put(2, range(320, 340), 4);
  put(3, range(330, 350), 4);
  put(4, join(range(310, 320), range(330, 340)), 4);
  put(4, join(range(320, 330), range(340, 350)), 5);
  return f;
}

}  // namespace testsupport
