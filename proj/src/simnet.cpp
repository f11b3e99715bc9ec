#include "commtrack/simnet.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include "commtrack/io.hpp"

namespace commtrack {
namespace {

double from_counts(SimilarityMetric metric, std::size_t shared, std::size_t size_a, std::size_t size_b) {
  if (metric == SimilarityMetric::overlap) {
    return static_cast<double>(shared) / static_cast<double>(std::min(size_a, size_b));
  }
  return static_cast<double>(shared) / static_cast<double>(size_a + size_b - shared);
}

}  // namespace

std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

double overlap_coefficient(std::span<const NodeId> a, std::span<const NodeId> b) {
  if (a.empty() || b.empty()) throw Error("overlap coefficient of an empty set");
  return from_counts(SimilarityMetric::overlap, intersection_size(a, b), a.size(), b.size());
}

double jaccard(std::span<const NodeId> a, std::span<const NodeId> b) {
  if (a.empty() && b.empty()) throw Error("jaccard of two empty sets");
  return from_counts(SimilarityMetric::jaccard, intersection_size(a, b), a.size(), b.size());
}

double similarity(SimilarityMetric metric, std::span<const NodeId> a, std::span<const NodeId> b) {
  return metric == SimilarityMetric::overlap ? overlap_coefficient(a, b) : jaccard(a, b);
}

std::size_t SimilarityNetwork::vertex_of(CommunityRef ref) const {
  if (ref.snapshot + 1 >= offsets_.size() || offsets_[ref.snapshot] + ref.community >= offsets_[ref.snapshot + 1]) {
    throw Error("unknown community reference");
  }
  return offsets_[ref.snapshot] + ref.community;
}

void SimilarityNetwork::append_snapshot(const Partition& p) {
  const auto snap = static_cast<std::uint32_t>(offsets_.size() - 1);
  for (std::uint32_t c = 0; c < p.size(); ++c) {
    if (p.communities[c].empty()) throw Error("empty community in snapshot " + std::to_string(snap + 1));
    vertices.push_back({snap, c});
    members.push_back(p.communities[c]);
  }
  offsets_.push_back(vertices.size());
}

Graph SimilarityNetwork::to_graph() const {
  std::vector<WeightedEdge> list;
  list.reserve(edges.size());
  for (const auto& e : edges) list.push_back({e.a, e.b, e.weight});
  return GraphBuilder::from_unique_edges(vertices.size(), std::move(list));
}

SimilarityNetwork build_similarity_network(std::span<const Partition> partitions, SimilarityMetric metric,
                                           unsigned threads) {
  SimilarityNetwork net;
  NodeId max_node = 0;
  for (const auto& p : partitions) {
    net.append_snapshot(p);
    for (const auto& c : p.communities) max_node = std::max(max_node, c.back());
  }
  const std::size_t snaps = partitions.size();

  // owner[s][x]: community of node x at snapshot s, or -1.
  std::vector<std::vector<std::int32_t>> owner(snaps, std::vector<std::int32_t>(max_node + 1, -1));
  for (std::size_t s = 0; s < snaps; ++s) {
    for (std::size_t c = 0; c < partitions[s].size(); ++c) {
      for (NodeId x : partitions[s].communities[c]) owner[s][x] = static_cast<std::int32_t>(c);
    }
  }

  auto scan_snapshot = [&](std::size_t i, std::vector<SimilarityEdge>& out) {
    std::vector<std::size_t> shared;
    std::vector<std::uint32_t> hit;
    for (std::uint32_t a = 0; a < partitions[i].size(); ++a) {
      const auto& alpha = partitions[i].communities[a];
      const auto va = static_cast<std::uint32_t>(net.vertex_of({static_cast<std::uint32_t>(i), a}));
      for (std::size_t j = i + 1; j < snaps; ++j) {
        shared.assign(partitions[j].size(), 0);
        hit.clear();
        for (NodeId x : alpha) {
          const std::int32_t c = owner[j][x];
          if (c < 0) continue;
          if (shared[c]++ == 0) hit.push_back(static_cast<std::uint32_t>(c));
        }
        std::sort(hit.begin(), hit.end());
        for (std::uint32_t b : hit) {
          const auto& beta = partitions[j].communities[b];
          const double w = from_counts(metric, shared[b], alpha.size(), beta.size());
          const auto vb = static_cast<std::uint32_t>(net.vertex_of({static_cast<std::uint32_t>(j), b}));
          out.push_back({va, vb, w});
        }
      }
    }
  };

  std::vector<std::vector<SimilarityEdge>> shards(snaps);
  if (threads <= 1 || snaps < 2) {
    for (std::size_t i = 0; i < snaps; ++i) scan_snapshot(i, shards[i]);
  } else {
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(snaps));
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < snaps; i += workers) scan_snapshot(i, shards[i]);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& shard : shards) net.edges.insert(net.edges.end(), shard.begin(), shard.end());
  return net;
}

void write_similarity_network(std::ostream& out, const SimilarityNetwork& net) {
  for (const auto& e : net.edges) {
    const auto& a = net.vertices[e.a];
    const auto& b = net.vertices[e.b];
    out << a.snapshot + 1 << '.' << a.community << ' ' << b.snapshot + 1 << '.' << b.community << ' '
        << format_double(e.weight) << '\n';
  }
}

}  // namespace commtrack
