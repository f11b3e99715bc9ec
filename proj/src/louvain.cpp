#include "commtrack/louvain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "commtrack/rng.hpp"

namespace commtrack {

double modularity(const Graph& g, const Partition& p) {
  if (!(g.total_weight() > 0.0)) throw Error("modularity undefined for edgeless graph");
  const std::size_t n = g.vertex_count();
  auto member = p.membership(n);
  std::size_t next = p.size();
  for (NodeId v = 0; v < n; ++v) {
    if (member[v] >= 0 && !g.contains(v)) throw Error("partition member " + std::to_string(v) + " not in graph");
    if (member[v] < 0 && g.contains(v)) member[v] = static_cast<std::int64_t>(next++);
  }
  std::vector<double> internal(next, 0.0), total(next, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    if (member[u] < 0) continue;
    const auto c = static_cast<std::size_t>(member[u]);
    total[c] += g.degree(u);
    internal[c] += g.self_loop(u);
    for (const auto& nb : g.neighbors(u)) {
      if (member[nb.vertex] == member[u]) internal[c] += nb.weight;
    }
  }
  const double two_m = 2.0 * g.total_weight();
  double q = 0.0;
  for (std::size_t c = 0; c < next; ++c) {
    const double share = total[c] / two_m;
    q += internal[c] / two_m - share * share;
  }
  return q;
}

ModularityState::ModularityState(const Graph& g)
    : graph_(&g),
      community_(g.vertex_count()),
      internal_(g.vertex_count()),
      total_(g.vertex_count()),
      twice_m_(2.0 * g.total_weight()) {
  for (NodeId x = 0; x < g.vertex_count(); ++x) {
    community_[x] = x;
    internal_[x] = g.self_loop(x);
    total_[x] = g.degree(x);
  }
}

double ModularityState::weight_to(NodeId x, CommunityId c) const {
  double w = 0.0;
  for (const auto& nb : graph_->neighbors(x)) {
    if (community_[nb.vertex] == c) w += nb.weight;
  }
  return w;
}

void ModularityState::remove(NodeId x, double weight_to_own) {
  const CommunityId c = community_[x];
  internal_[c] -= 2.0 * weight_to_own + graph_->self_loop(x);
  total_[c] -= graph_->degree(x);
  community_[x] = kNone;
}

void ModularityState::insert(NodeId x, CommunityId c, double weight_to_target) {
  internal_[c] += 2.0 * weight_to_target + graph_->self_loop(x);
  total_[c] += graph_->degree(x);
  community_[x] = c;
}

double ModularityState::value() const {
  double q = 0.0;
  for (std::size_t c = 0; c < internal_.size(); ++c) {
    const double share = total_[c] / twice_m_;
    q += internal_[c] / twice_m_ - share * share;
  }
  return q;
}

double modularity_gain(const ModularityState& state, NodeId x, CommunityId target, double weight_to_target) {
  if (target >= state.community_count()) throw Error("unknown community " + std::to_string(target));
  const double two_m = state.twice_m();
  const double k_x = state.graph().degree(x);
  // The S_in and (k_x/2m)^2 terms of the two brackets cancel exactly.
  return 2.0 * weight_to_target / two_m - 2.0 * state.total(target) * k_x / (two_m * two_m);
}

double modularity_gain(const ModularityState& state, NodeId x, CommunityId target) {
  if (state.community_of(x) != ModularityState::kNone) {
    throw Error("modularity_gain: vertex " + std::to_string(x) + " must be detached first");
  }
  if (target >= state.community_count()) throw Error("unknown community " + std::to_string(target));
  return modularity_gain(state, x, target, state.weight_to(x, target));
}

LocalMoveStats local_moving(ModularityState& state, const LocalMoveOptions& options, const MoveObserver& observer) {
  const Graph& g = state.graph();
  LocalMoveStats stats;
  if (!(g.total_weight() > 0.0)) return stats;

  std::vector<NodeId> order;
  for (NodeId x = 0; x < g.vertex_count(); ++x) {
    if (!g.neighbors(x).empty()) order.push_back(x);
  }
  Rng rng(options.seed);
  rng.shuffle(order);

  std::vector<double> link(state.community_count(), 0.0);
  std::vector<char> seen(state.community_count(), 0);
  std::vector<CommunityId> touched;

  while (stats.sweeps < options.max_sweeps) {
    ++stats.sweeps;
    double sweep_gain = 0.0;
    std::size_t sweep_moves = 0;
    for (NodeId x : order) {
      const CommunityId home = state.community_of(x);
      touched.clear();
      for (const auto& nb : g.neighbors(x)) {
        const CommunityId c = state.community_of(nb.vertex);
        if (!seen[c]) {
          seen[c] = 1;
          touched.push_back(c);
        }
        link[c] += nb.weight;
      }
      const double w_home = link[home];
      state.remove(x, w_home);

      const double home_gain = modularity_gain(state, x, home, w_home);
      CommunityId best = home;
      double best_gain = home_gain;
      for (CommunityId c : touched) {
        if (c == home) continue;
        const double gain = modularity_gain(state, x, c, link[c]);
        if (gain > best_gain || (gain == best_gain && c < best)) {
          best = c;
          best_gain = gain;
        }
      }
      if (best != home && best_gain > home_gain) {
        state.insert(x, best, link[best]);
        const double improvement = best_gain - home_gain;
        sweep_gain += improvement;
        ++sweep_moves;
        if (observer) observer(MoveRecord{x, home, best, improvement}, state);
      } else {
        state.insert(x, home, w_home);
      }
      for (CommunityId c : touched) {
        link[c] = 0.0;
        seen[c] = 0;
      }
    }
    stats.moves += sweep_moves;
    stats.improvement += sweep_gain;
    if (sweep_moves == 0 || sweep_gain < options.sweep_tolerance) break;
  }
  return stats;
}

Graph aggregate(const Graph& g, const std::vector<CommunityId>& assignment, std::size_t community_count) {
  GraphBuilder builder(community_count, true);
  for (NodeId u = 0; u < g.vertex_count(); ++u) {
    if (!g.contains(u)) continue;
    const CommunityId cu = assignment[u];
    builder.add_vertex(cu);
    if (g.self_loop(u) != 0.0) builder.add_self_loop(cu, g.self_loop(u));
  }
  g.for_each_edge([&](NodeId u, NodeId v, double w) {
    const CommunityId cu = assignment[u], cv = assignment[v];
    if (cu == cv) {
      builder.add_self_loop(cu, 2.0 * w);
    } else {
      builder.add_edge(cu, cv, w);
    }
  });
  return builder.build();
}

namespace {

// Dense renumbering ordered by the smallest vertex of each community.
std::size_t renumber(std::vector<CommunityId>& assignment, const Graph& g) {
  std::vector<CommunityId> remap(assignment.size(), ModularityState::kNone);
  CommunityId next = 0;
  for (NodeId v = 0; v < assignment.size(); ++v) {
    if (!g.contains(v)) continue;
    CommunityId& r = remap[assignment[v]];
    if (r == ModularityState::kNone) r = next++;
    assignment[v] = r;
  }
  return next;
}

}  // namespace

LouvainResult detect(const Graph& g, std::uint64_t seed, std::size_t max_passes) {
  if (!(g.total_weight() > 0.0) || g.edge_count() == 0) throw Error("louvain: edgeless graph");
  LouvainResult result;
  result.seed = seed;

  // original vertex -> vertex of the current (aggregated) graph
  std::vector<CommunityId> to_current(g.vertex_count());
  std::iota(to_current.begin(), to_current.end(), 0);

  std::unique_ptr<Graph> owned;
  const Graph* current = &g;
  double previous = -std::numeric_limits<double>::infinity();

  for (std::size_t pass = 0; pass < std::max<std::size_t>(max_passes, 1); ++pass) {
    ModularityState state(*current);
    LocalMoveOptions options;
    options.seed = derive_seed(seed, pass);
    const auto stats = local_moving(state, options);
    if (stats.moves == 0 && !result.levels.empty()) break;

    std::vector<CommunityId> assignment(current->vertex_count());
    for (NodeId v = 0; v < current->vertex_count(); ++v) assignment[v] = state.community_of(v);
    const std::size_t count = renumber(assignment, *current);

    Partition level;
    level.communities.resize(count);
    for (NodeId v = 0; v < g.vertex_count(); ++v) {
      if (!g.contains(v)) continue;
      to_current[v] = assignment[to_current[v]];
      if (g.degree(v) > 0.0) level.communities[to_current[v]].push_back(v);
    }
    level.normalize();
    const double q = modularity(g, level);
    if (!result.levels.empty() && q - previous < options.sweep_tolerance) break;
    result.levels.push_back(std::move(level));
    result.modularity.push_back(q);
    previous = q;
    if (stats.moves == 0) break;

    owned = std::make_unique<Graph>(aggregate(*current, assignment, count));
    current = owned.get();
  }
  return result;
}

const Partition& pick_level(const LouvainResult& result, std::size_t target_count) {
  if (result.levels.empty()) throw Error("pick_level: no levels");
  std::size_t best = 0;
  auto distance = [&](std::size_t i) {
    const auto n = result.levels[i].size();
    return n > target_count ? n - target_count : target_count - n;
  };
  for (std::size_t i = 1; i < result.levels.size(); ++i) {
    if (distance(i) < distance(best)) best = i;
  }
  return result.levels[best];
}

}  // namespace commtrack
