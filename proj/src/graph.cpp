#include "commtrack/graph.hpp"

#include <algorithm>
#include <cmath>

namespace commtrack {

NodeId NodeIndex::intern(std::string_view label) {
  auto it = ids_.find(std::string(label));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<NodeId>(labels_.size());
  labels_.emplace_back(label);
  ids_.emplace(labels_.back(), id);
  return id;
}

std::int64_t NodeIndex::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  return it == ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::vector<NodeId> Graph::present_vertices() const {
  std::vector<NodeId> out;
  out.reserve(present_count_);
  for (NodeId v = 0; v < present_.size(); ++v) {
    if (present_[v]) out.push_back(v);
  }
  return out;
}

GraphBuilder::GraphBuilder(std::size_t vertex_count, bool allow_self_loops)
    : n_(vertex_count), allow_loops_(allow_self_loops), present_(vertex_count, 0), loops_(vertex_count, 0.0) {}

void GraphBuilder::add_vertex(NodeId v) {
  if (v >= n_) throw Error("vertex " + std::to_string(v) + " out of range");
  present_[v] = 1;
}

void GraphBuilder::add_edge(NodeId u, NodeId v, double weight) {
  if (!std::isfinite(weight) || weight < 0.0) {
    throw Error("edge weight must be finite and nonnegative");
  }
  if (u == v) {
    if (!allow_loops_) throw Error("self-loop rejected");
    add_self_loop(u, 2.0 * weight);
    return;
  }
  add_vertex(u);
  add_vertex(v);
  if (weight == 0.0) return;
  if (u > v) std::swap(u, v);
  const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
  auto [it, inserted] = slot_.try_emplace(key, edges_.size());
  if (inserted) {
    edges_.push_back({u, v, weight});
  } else {
    edges_[it->second].w += weight;
    ++duplicates_;
  }
}

void GraphBuilder::add_self_loop(NodeId v, double diagonal_weight) {
  add_vertex(v);
  loops_[v] += diagonal_weight;
}

bool GraphBuilder::has_edge(NodeId u, NodeId v) const {
  if (u > v) std::swap(u, v);
  return slot_.count((static_cast<std::uint64_t>(u) << 32) | v) != 0;
}

Graph GraphBuilder::build() const {
  std::vector<PendingEdge> sorted = edges_;
  std::sort(sorted.begin(), sorted.end(), [](const PendingEdge& a, const PendingEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  return assemble(n_, present_, loops_, std::move(sorted));
}

Graph GraphBuilder::from_unique_edges(std::size_t vertex_count, std::vector<WeightedEdge> edges) {
  for (const auto& e : edges) {
    if (e.u >= e.v || e.v >= vertex_count || !(e.w > 0.0) || !std::isfinite(e.w)) {
      throw Error("from_unique_edges needs u < v < vertex_count and positive finite weights");
    }
  }
  if (!std::is_sorted(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
      })) {
    std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) throw Error("repeated edge");
  }
  return assemble(vertex_count, std::vector<char>(vertex_count, 1), std::vector<double>(vertex_count, 0.0),
                  std::move(edges));
}

// `sorted` is ordered by (u, v) with u < v.
Graph GraphBuilder::assemble(std::size_t n, std::vector<char> present, std::vector<double> loops,
                             std::vector<PendingEdge> sorted) {
  Graph g;
  g.present_ = std::move(present);
  g.present_count_ = static_cast<std::size_t>(std::count(g.present_.begin(), g.present_.end(), 1));
  g.loops_ = std::move(loops);
  g.degrees_.assign(n, 0.0);

  std::vector<std::size_t> counts(n + 1, 0);
  for (const auto& e : sorted) {
    ++counts[e.u + 1];
    ++counts[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) counts[i + 1] += counts[i];
  g.offsets_ = counts;
  g.adjacency_.resize(counts[n]);
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  // Lower neighbors first (u for each edge (u, v), in u order), then higher
  // ones (v for each edge, in v order): every list comes out sorted.
  for (const auto& e : sorted) {
    g.adjacency_[cursor[e.v]++] = {e.u, e.w};
    g.degrees_[e.u] += e.w;
    g.degrees_[e.v] += e.w;
  }
  for (const auto& e : sorted) g.adjacency_[cursor[e.u]++] = {e.v, e.w};
  double twice_m = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    g.degrees_[v] += g.loops_[v];
    twice_m += g.degrees_[v];
  }
  g.total_weight_ = twice_m / 2.0;
  return g;
}

double weighted_degree(const Graph& g, NodeId x) {
  if (!g.contains(x)) throw Error("unknown node " + std::to_string(x));
  return g.degree(x);
}

std::size_t Partition::member_count() const {
  std::size_t n = 0;
  for (const auto& c : communities) n += c.size();
  return n;
}

std::vector<std::int64_t> Partition::membership(std::size_t vertex_count) const {
  std::vector<std::int64_t> out(vertex_count, -1);
  for (std::size_t c = 0; c < communities.size(); ++c) {
    for (NodeId v : communities[c]) {
      if (v >= vertex_count) throw Error("partition member " + std::to_string(v) + " out of range");
      if (out[v] != -1) throw Error("node " + std::to_string(v) + " assigned to two communities");
      out[v] = static_cast<std::int64_t>(c);
    }
  }
  return out;
}

void Partition::normalize() {
  for (auto& c : communities) std::sort(c.begin(), c.end());
  std::erase_if(communities, [](const auto& c) { return c.empty(); });
  std::sort(communities.begin(), communities.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

}  // namespace commtrack
