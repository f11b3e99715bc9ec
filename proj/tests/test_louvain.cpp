#include <cmath>
#include <limits>

#include "commtrack/louvain.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace commtrack;
using namespace testsupport;

namespace {

Graph from_edges(std::size_t n, std::initializer_list<std::tuple<NodeId, NodeId, double>> edges) {
  GraphBuilder b(n);
  for (NodeId v = 0; v < n; ++v) b.add_vertex(v);
  for (auto [u, v, w] : edges) b.add_edge(u, v, w);
  return b.build();
}

Graph two_triangles() {
  return from_edges(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
}

Partition part(std::vector<std::vector<NodeId>> c) {
  Partition p;
  p.communities = std::move(c);
  return p;
}

double exhaustive_optimum(const Graph& g) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_set_partition(g.vertex_count(), [&](const std::vector<std::uint32_t>& labels) {
    best = std::max(best, static_cast<double>(modularity_oracle(g, labels)));
  });
  return best;
}

}  // namespace

TEST_CASE("modularity worked examples") {
  Graph tri = two_triangles();
  CHECK(modularity(tri, part({{0, 1, 2, 3, 4, 5}})) == doctest::Approx(0.0));
  CHECK(modularity(tri, part({{0, 1, 2}, {3, 4, 5}})) == doctest::Approx(0.5));
  Graph edge = from_edges(2, {{0, 1, 1.0}});
  CHECK(modularity(edge, part({{0}, {1}})) == doctest::Approx(-0.5));
  // Uncovered vertices are singletons.
  CHECK(modularity(edge, part({})) == doctest::Approx(-0.5));
  GraphBuilder empty(3);
  empty.add_vertex(0);
  CHECK_THROWS_WITH_AS(modularity(empty.build(), part({})), "modularity undefined for edgeless graph", Error);
}

TEST_CASE("modularity agrees with the pairwise double sum") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    Graph g = random_graph(rng, 2 + rng.below(14), 0.4, trial % 3 == 0);
    if (g.total_weight() <= 0.0) continue;
    std::vector<std::uint32_t> labels(g.vertex_count());
    Partition p;
    const std::size_t k = 1 + rng.below(4);
    p.communities.resize(k);
    for (NodeId v = 0; v < g.vertex_count(); ++v) {
      labels[v] = static_cast<std::uint32_t>(rng.below(k));
      p.communities[labels[v]].push_back(v);
    }
    std::erase_if(p.communities, [](const auto& c) { return c.empty(); });
    CHECK(modularity(g, p) == doctest::Approx(static_cast<double>(modularity_oracle(g, labels))).epsilon(1e-12));
  }
}

TEST_CASE("gain with no edges into the target") {
  Graph g = from_edges(4, {{0, 1, 1}, {1, 2, 2}, {2, 3, 1}});
  ModularityState s(g);
  s.remove(0, 0.0);
  const double two_m = s.twice_m();
  const double expected = -2.0 * s.total(3) * g.degree(0) / (two_m * two_m);
  CHECK(modularity_gain(s, 0, 3) == doctest::Approx(expected));
  CHECK(modularity_gain(s, 0, 3) <= 0.0);
}

TEST_CASE("gain into an empty community") {
  Graph g = from_edges(3, {{0, 1, 1}, {1, 2, 1}});
  ModularityState s(g);
  s.remove(1, 0.0);
  // Community 1 is now empty.
  CHECK(s.total(1) == 0.0);
  CHECK(modularity_gain(s, 1, 1, 0.75) == doctest::Approx(2.0 * 0.75 / s.twice_m()));
}

TEST_CASE("gain of b into {a} on a path equals the modularity difference") {
  Graph g = from_edges(3, {{0, 1, 1}, {1, 2, 1}});
  ModularityState s(g);
  s.remove(1, 0.0);
  const double before = modularity(g, part({{0}, {1}, {2}}));
  const double after = modularity(g, part({{0, 1}, {2}}));
  // Detached b re-entering its own empty singleton contributes nothing.
  CHECK(modularity_gain(s, 1, 1) == doctest::Approx(0.0));
  CHECK(modularity_gain(s, 1, 0) == doctest::Approx(after - before).epsilon(1e-12));
}

TEST_CASE("gain rejects unknown targets and attached vertices") {
  Graph g = from_edges(2, {{0, 1, 1}});
  ModularityState s(g);
  CHECK_THROWS_AS(modularity_gain(s, 0, 1), Error);
  s.remove(0, 0.0);
  CHECK_THROWS_AS(modularity_gain(s, 0, 7), Error);
  CHECK_THROWS_AS(modularity_gain(s, 0, 7, 1.0), Error);
}

TEST_CASE("detect on two triangles and K4") {
  auto r = detect(two_triangles(), 42);
  REQUIRE(!r.levels.empty());
  CHECK(r.levels[0].communities == std::vector<std::vector<NodeId>>{{0, 1, 2}, {3, 4, 5}});
  CHECK(r.modularity[0] == doctest::Approx(0.5));
  CHECK(exhaustive_optimum(two_triangles()) == doctest::Approx(0.5));

  Graph k4 = from_edges(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1}, {2, 3, 1}});
  auto rk = detect(k4, 7);
  CHECK(rk.levels.back().size() == 1);
  CHECK(exhaustive_optimum(k4) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("detect is deterministic per seed and rejects edgeless graphs") {
  Rng rng(2);
  Graph g = random_graph(rng, 60, 0.08);
  auto a = detect(g, 99), b = detect(g, 99);
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t i = 0; i < a.levels.size(); ++i) CHECK(a.levels[i].communities == b.levels[i].communities);
  CHECK(a.modularity == b.modularity);
  CHECK(a.seed == 99);
  GraphBuilder empty(3);
  for (NodeId v = 0; v < 3; ++v) empty.add_vertex(v);
  CHECK_THROWS_AS(detect(empty.build(), 1), Error);
}

TEST_CASE("pick_level") {
  auto make = [](std::vector<std::size_t> counts) {
    LouvainResult r;
    for (auto c : counts) {
      Partition p;
      for (NodeId i = 0; i < c; ++i) p.communities.push_back({i});
      r.levels.push_back(p);
      r.modularity.push_back(0.0);
    }
    return r;
  };
  auto r1 = make({50, 12, 3});
  CHECK(pick_level(r1, 10).size() == 12);
  auto r2 = make({8, 12});
  CHECK(pick_level(r2, 10).size() == 8);
  auto r3 = make({5});
  CHECK(pick_level(r3, 100).size() == 5);
  CHECK_THROWS_AS(pick_level(LouvainResult{}, 1), Error);
}

TEST_CASE("property: every accepted move strictly improves modularity by the recorded gain") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g = random_graph(rng, 3 + rng.below(20), 0.3, trial % 2 == 1);
    if (g.total_weight() <= 0.0) continue;
    ModularityState state(g);
    std::vector<std::uint32_t> labels(g.vertex_count());
    std::iota(labels.begin(), labels.end(), 0u);
    long double q = modularity_oracle(g, labels);
    LocalMoveOptions opts;
    opts.seed = trial;
    local_moving(state, opts, [&](const MoveRecord& m, const ModularityState& st) {
      labels[m.vertex] = m.to;
      const long double next = modularity_oracle(g, labels);
      CHECK(m.improvement > 0.0);
      CHECK(static_cast<double>(next - q) == doctest::Approx(m.improvement).epsilon(1e-9));
      CHECK(st.value() == doctest::Approx(static_cast<double>(next)).epsilon(1e-9));
      q = next;
    });
  }
}

TEST_CASE("property: finest level beats the singleton partition") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g = random_graph(rng, 4 + rng.below(40), 0.15);
    if (g.edge_count() == 0) continue;
    auto r = detect(g, trial);
    CHECK(modularity(g, r.levels.front()) >= modularity(g, part({})) - 1e-12);
  }
}

TEST_CASE("property: levels nest and modularity never decreases") {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    Graph g = random_graph(rng, 20 + rng.below(60), 0.08);
    if (g.edge_count() == 0) continue;
    auto r = detect(g, trial);
    for (std::size_t l = 1; l < r.levels.size(); ++l) {
      CHECK(r.modularity[l] >= r.modularity[l - 1]);
      const auto coarse = r.levels[l].membership(g.vertex_count());
      for (const auto& c : r.levels[l - 1].communities) {
        for (NodeId v : c) CHECK(coarse[v] == coarse[c.front()]);
      }
    }
  }
}

TEST_CASE("property: aggregation preserves m and modularity") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g = random_graph(rng, 3 + rng.below(25), 0.3, trial % 2 == 0);
    if (g.total_weight() <= 0.0) continue;
    const std::size_t k = 1 + rng.below(5);
    std::vector<CommunityId> assign(g.vertex_count());
    for (auto& a : assign) a = static_cast<CommunityId>(rng.below(k));
    // Dense ids.
    std::vector<CommunityId> remap(k, UINT32_MAX);
    CommunityId next = 0;
    for (auto& a : assign) {
      if (remap[a] == UINT32_MAX) remap[a] = next++;
      a = remap[a];
    }
    Graph h = aggregate(g, assign, next);
    CHECK(h.total_weight() == doctest::Approx(g.total_weight()).epsilon(1e-12));
    Partition p;
    p.communities.resize(next);
    for (NodeId v = 0; v < g.vertex_count(); ++v) p.communities[assign[v]].push_back(v);
    std::vector<std::uint32_t> singleton(next);
    std::iota(singleton.begin(), singleton.end(), 0u);
    CHECK(static_cast<double>(modularity_oracle(h, singleton)) == doctest::Approx(modularity(g, p)).epsilon(1e-12));
  }
}

TEST_CASE("property: at least 95% of random 8-node graphs reach the exhaustive optimum") {
  Rng rng(7);
  int reached = 0, total = 0;
  while (total < 200) {
    Graph g = random_graph(rng, 8, 0.4);
    if (g.edge_count() == 0) continue;
    ++total;
    const double opt = exhaustive_optimum(g);
    auto r = detect(g, total);
    const double best = *std::max_element(r.modularity.begin(), r.modularity.end());
    CHECK(best <= opt + 1e-9);
    if (std::abs(best - opt) <= 1e-9) {
      ++reached;
    } else {
      MESSAGE("local optimum on trial " << total << ": " << best << " < " << opt);
    }
  }
  CHECK(reached >= 190);
}

TEST_CASE("set partition enumeration counts Bell numbers") {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  for (std::size_t n = 1; n <= 8; ++n) {
    std::size_t count = 0;
    for_each_set_partition(n, [&](const auto&) { ++count; });
    CHECK(count == bell[n]);
  }
}
