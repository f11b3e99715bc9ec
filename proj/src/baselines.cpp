#include "commtrack/baselines.hpp"

#include <algorithm>
#include <tuple>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

namespace commtrack {
namespace {

constexpr std::array<std::string_view, 5> kMethodNames{"greene", "takaffoli", "ged", "tajeuna", "icem"};

// Flat numbering of all communities in (snapshot, community) order.
struct CommunityIndex {
  std::vector<CommunityRef> refs;
  std::vector<std::uint32_t> offsets{0};

  explicit CommunityIndex(std::span<const Partition> partitions) {
    for (std::uint32_t t = 0; t < partitions.size(); ++t) {
      for (std::uint32_t c = 0; c < partitions[t].size(); ++c) refs.push_back({t, c});
      offsets.push_back(static_cast<std::uint32_t>(refs.size()));
    }
  }
  std::uint32_t id(CommunityRef r) const { return offsets[r.snapshot] + r.community; }
  std::size_t size() const { return refs.size(); }
};

const std::vector<NodeId>& members_of(std::span<const Partition> partitions, CommunityRef r) {
  return partitions[r.snapshot].communities[r.community];
}

// Intersection sizes of every pair of communities from distinct snapshots
// that share at least one member. Keys are (earlier id, later id).
std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> shared_counts(std::span<const Partition> partitions,
                                                                             const CommunityIndex& index) {
  std::map<NodeId, std::vector<std::uint32_t>> owners;
  for (std::uint32_t i = 0; i < index.size(); ++i) {
    for (NodeId v : members_of(partitions, index.refs[i])) owners[v].push_back(i);
  }
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> counts;
  for (const auto& [node, list] : owners) {
    // list is increasing; one entry per snapshot since partitions are disjoint.
    for (std::size_t x = 0; x < list.size(); ++x) {
      for (std::size_t y = x + 1; y < list.size(); ++y) ++counts[{list[x], list[y]}];
    }
  }
  return counts;
}

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

std::string_view to_string(BaselineMethod method) { return kMethodNames[static_cast<std::size_t>(method)]; }

std::optional<BaselineMethod> parse_baseline_method(std::string_view name) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == name) return static_cast<BaselineMethod>(i);
  }
  return std::nullopt;
}

BaselineConfig BaselineConfig::evaluated(BaselineMethod method) {
  BaselineConfig cfg;
  cfg.method = method;
  switch (method) {
    case BaselineMethod::greene:
      cfg.k = 0.1;
      break;
    case BaselineMethod::takaffoli:
      cfg.k = 0.3;
      break;
    case BaselineMethod::ged:
      cfg.k = 0.1;
      cfg.secondary = 0.1;
      break;
    case BaselineMethod::tajeuna:
      cfg.k = 0.3;
      break;
    case BaselineMethod::icem:
      cfg.k = 0.1;
      cfg.secondary = 0.5;
      break;
  }
  return cfg;
}

void BaselineConfig::validate() const {
  check_unit(k, "threshold k");
  check_unit(secondary, "secondary threshold");
  if (dissolve_after && *dissolve_after == 0) throw Error("dissolution window must be at least 1");
}

std::vector<DynamicCommunity> components_of(std::span<const Partition> partitions,
                                            std::span<const BaselineLink> links) {
  const CommunityIndex index(partitions);
  std::vector<std::uint32_t> parent(index.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& l : links) {
    auto a = find(index.id(l.a)), b = find(index.id(l.b));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::uint32_t, std::vector<CommunityRef>> groups;
  for (std::uint32_t i = 0; i < index.size(); ++i) groups[find(i)].push_back(index.refs[i]);
  std::vector<std::vector<CommunityRef>> out;
  for (auto& [root, refs] : groups) out.push_back(std::move(refs));
  return assemble_dynamic_communities(std::move(out), partitions);
}

// Greene ----------------------------------------------------------------

namespace {

struct GreeneRun {
  std::vector<BaselineLink> links;
  // Creation-ordered dynamic communities; each holds its timeline refs.
  std::vector<std::vector<CommunityRef>> timelines;
};

GreeneRun run_greene(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  cfg.validate();
  struct Live {
    std::vector<CommunityRef> timeline;
    CommunityRef front;
    std::uint32_t last_matched;
    bool open = true;
  };
  std::vector<Live> dyn;
  GreeneRun run;

  for (std::uint32_t t = 0; t < partitions.size(); ++t) {
    const auto& p = partitions[t];
    if (p.empty()) continue;
    std::vector<bool> matched(p.size(), false);
    const std::size_t existing = dyn.size();
    for (std::size_t d = 0; d < existing; ++d) {
      if (!dyn[d].open) continue;
      const auto& front = members_of(partitions, dyn[d].front);
      // Every community of t matching this front, best match first.
      std::vector<std::pair<double, std::uint32_t>> hits;
      for (std::uint32_t c = 0; c < p.size(); ++c) {
        const double j = jaccard(front, p.communities[c]);
        if (j > cfg.k) hits.push_back({j, c});
      }
      if (hits.empty()) continue;
      std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      const auto history = dyn[d].timeline;
      for (std::size_t h = 0; h < hits.size(); ++h) {
        const CommunityRef ref{t, hits[h].second};
        matched[ref.community] = true;
        run.links.push_back({dyn[d].front, ref, hits[h].first});
        if (h == 0) continue;
        // Additional matches branch off with a copy of the history.
        Live branch{history, ref, t};
        branch.timeline.push_back(ref);
        dyn.push_back(std::move(branch));
      }
      const CommunityRef best{t, hits[0].second};
      dyn[d].timeline.push_back(best);
      dyn[d].front = best;
      dyn[d].last_matched = t;
    }
    for (std::uint32_t c = 0; c < p.size(); ++c) {
      if (!matched[c]) dyn.push_back({{CommunityRef{t, c}}, CommunityRef{t, c}, t});
    }
    if (cfg.dissolve_after) {
      for (auto& d : dyn) {
        if (d.open && t - d.last_matched >= *cfg.dissolve_after) d.open = false;
      }
    }
  }
  for (auto& d : dyn) run.timelines.push_back(std::move(d.timeline));
  // Dynamic communities sharing a front report the same match once.
  std::sort(run.links.begin(), run.links.end(),
            [](const BaselineLink& x, const BaselineLink& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  run.links.erase(std::unique(run.links.begin(), run.links.end(),
                              [](const BaselineLink& x, const BaselineLink& y) { return x.a == y.a && x.b == y.b; }),
                  run.links.end());
  return run;
}

}  // namespace

std::vector<BaselineLink> greene_links(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  return run_greene(partitions, cfg).links;
}

std::vector<DynamicCommunity> greene_track(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  auto run = run_greene(partitions, cfg);
  // Label every community with the earliest-created dynamic community that
  // contains it.
  std::map<CommunityRef, std::size_t> owner;
  for (std::size_t d = 0; d < run.timelines.size(); ++d) {
    for (const auto& r : run.timelines[d]) owner.try_emplace(r, d);
  }
  std::vector<std::vector<CommunityRef>> groups(run.timelines.size());
  for (const auto& [ref, d] : owner) groups[d].push_back(ref);
  return assemble_dynamic_communities(std::move(groups), partitions);
}

// Takaffoli ---------------------------------------------------------------

double takaffoli_similarity(std::span<const NodeId> a, std::span<const NodeId> b, double k) {
  const std::size_t largest = std::max(a.size(), b.size());
  if (largest == 0) return 0.0;
  const double s = static_cast<double>(intersection_size(a, b)) / static_cast<double>(largest);
  return s >= k ? s : 0.0;
}

std::vector<BaselineLink> takaffoli_links(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  cfg.validate();
  const CommunityIndex index(partitions);
  std::vector<BaselineLink> links;
  for (const auto& [pair, shared] : shared_counts(partitions, index)) {
    const auto a = index.refs[pair.first], b = index.refs[pair.second];
    const std::size_t largest = std::max(members_of(partitions, a).size(), members_of(partitions, b).size());
    const double s = static_cast<double>(shared) / static_cast<double>(largest);
    if (s >= cfg.k) links.push_back({a, b, s});
  }
  return links;
}

std::vector<DynamicCommunity> takaffoli_track(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  const auto links = takaffoli_links(partitions, cfg);
  return components_of(partitions, links);
}

// GED -------------------------------------------------------------------

double ged_inclusion(std::span<const NodeId> a, std::span<const NodeId> b, const Graph& g) {
  if (a.empty()) return 0.0;
  std::vector<double> importance(a.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!g.contains(a[i])) continue;
    for (const auto& n : g.neighbors(a[i])) {
      if (std::binary_search(a.begin(), a.end(), n.vertex)) importance[i] += n.weight;
    }
    total += importance[i];
  }
  if (total <= 0.0) {
    std::fill(importance.begin(), importance.end(), 1.0);
    total = static_cast<double>(a.size());
  }
  double shared_importance = 0.0;
  std::size_t shared = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::binary_search(b.begin(), b.end(), a[i])) {
      ++shared;
      shared_importance += importance[i];
    }
  }
  return static_cast<double>(shared) / static_cast<double>(a.size()) * (shared_importance / total);
}

std::vector<BaselineLink> ged_links(std::span<const Partition> partitions, const SnapshotSeries& series,
                                    const BaselineConfig& cfg) {
  cfg.validate();
  if (series.size() < partitions.size()) throw Error("GED needs a snapshot graph for every partition");
  std::vector<BaselineLink> links;
  for (std::uint32_t t = 0; t + 1 < partitions.size(); ++t) {
    const auto& p = partitions[t];
    const auto& q = partitions[t + 1];
    std::map<NodeId, std::uint32_t> owner_next;
    for (std::uint32_t c = 0; c < q.size(); ++c) {
      for (NodeId v : q.communities[c]) owner_next[v] = c;
    }
    for (std::uint32_t a = 0; a < p.size(); ++a) {
      std::vector<std::uint32_t> candidates;
      for (NodeId v : p.communities[a]) {
        if (auto it = owner_next.find(v); it != owner_next.end()) candidates.push_back(it->second);
      }
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      for (std::uint32_t b : candidates) {
        const double forward = ged_inclusion(p.communities[a], q.communities[b], series.graph(t));
        const double backward = ged_inclusion(q.communities[b], p.communities[a], series.graph(t + 1));
        if (forward >= cfg.k && backward >= cfg.secondary) links.push_back({{t, a}, {t + 1, b}, forward});
      }
    }
  }
  return links;
}

std::vector<DynamicCommunity> ged_track(std::span<const Partition> partitions, const SnapshotSeries& series,
                                        const BaselineConfig& cfg) {
  const auto links = ged_links(partitions, series, cfg);
  return components_of(partitions, links);
}

// Tajeuna ---------------------------------------------------------------

std::vector<SparseVector> tajeuna_vectors(std::span<const Partition> partitions) {
  const CommunityIndex index(partitions);
  std::vector<SparseVector> out(index.size());
  for (const auto& [pair, shared] : shared_counts(partitions, index)) {
    const auto [a, b] = pair;
    out[a].push_back({b, static_cast<double>(shared) / members_of(partitions, index.refs[a]).size()});
    out[b].push_back({a, static_cast<double>(shared) / members_of(partitions, index.refs[b]).size()});
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

double tajeuna_similarity(const SparseVector& pa, const SparseVector& pb) {
  double sum = 0.0;
  auto i = pa.begin(), j = pb.begin();
  while (i != pa.end() && j != pb.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      if (i->second + j->second > 0.0) sum += 2.0 * i->second * j->second / (i->second + j->second);
      ++i;
      ++j;
    }
  }
  return sum;
}

std::vector<BaselineLink> tajeuna_links(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  cfg.validate();
  const CommunityIndex index(partitions);
  const auto vectors = tajeuna_vectors(partitions);
  // Candidate pairs share a nonzero component: both overlap some community x.
  std::vector<std::vector<std::uint32_t>> holders(index.size());
  for (std::uint32_t a = 0; a < index.size(); ++a) {
    for (const auto& [x, p] : vectors[a]) holders[x].push_back(a);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (const auto& list : holders) {
    for (std::size_t x = 0; x < list.size(); ++x) {
      for (std::size_t y = x + 1; y < list.size(); ++y) {
        if (index.refs[list[x]].snapshot != index.refs[list[y]].snapshot) pairs.push_back({list[x], list[y]});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<BaselineLink> links;
  for (const auto& [a, b] : pairs) {
    const double s = tajeuna_similarity(vectors[a], vectors[b]);
    if (s > cfg.k) links.push_back({index.refs[a], index.refs[b], s});
  }
  return links;
}

std::vector<DynamicCommunity> tajeuna_track(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  const auto links = tajeuna_links(partitions, cfg);
  return components_of(partitions, links);
}

// ICEM ------------------------------------------------------------------

std::vector<BaselineLink> icem_links(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  cfg.validate();
  std::map<NodeId, std::vector<CommunityRef>> seen;
  std::vector<BaselineLink> links;
  for (std::uint32_t t = 0; t < partitions.size(); ++t) {
    const auto& p = partitions[t];
    for (std::uint32_t c = 0; c < p.size(); ++c) {
      const auto& beta = p.communities[c];
      std::map<CommunityRef, std::size_t> shared;
      for (NodeId v : beta) {
        if (auto it = seen.find(v); it != seen.end()) {
          for (const auto& r : it->second) ++shared[r];
        }
      }
      for (const auto& [alpha_ref, n] : shared) {
        const auto& alpha = members_of(partitions, alpha_ref);
        const double to_alpha = static_cast<double>(n) / static_cast<double>(alpha.size());
        const double to_beta = static_cast<double>(n) / static_cast<double>(beta.size());
        if (to_alpha > cfg.k && to_beta > cfg.k) {
          links.push_back({alpha_ref, {t, c}, to_alpha, to_alpha > cfg.secondary});
        }
      }
    }
    // Index this snapshot only after it has been compared with earlier ones.
    for (std::uint32_t c = 0; c < p.size(); ++c) {
      for (NodeId v : p.communities[c]) seen[v].push_back({t, c});
    }
  }
  return links;
}

std::vector<DynamicCommunity> icem_track(std::span<const Partition> partitions, const BaselineConfig& cfg) {
  const auto links = icem_links(partitions, cfg);
  return components_of(partitions, links);
}

// Adapter ---------------------------------------------------------------

BaselineTracker::BaselineTracker(BaselineConfig cfg, const SnapshotSeries* series) : cfg_(cfg), series_(series) {
  cfg_.validate();
  if (cfg_.method == BaselineMethod::ged && series_ == nullptr) throw Error("GED tracker needs the snapshot graphs");
}

std::string BaselineTracker::name() const { return std::string(to_string(cfg_.method)); }

std::vector<DynamicCommunity> BaselineTracker::track(std::span<const Partition> partitions) const {
  switch (cfg_.method) {
    case BaselineMethod::greene:
      return greene_track(partitions, cfg_);
    case BaselineMethod::takaffoli:
      return takaffoli_track(partitions, cfg_);
    case BaselineMethod::ged:
      return ged_track(partitions, *series_, cfg_);
    case BaselineMethod::tajeuna:
      return tajeuna_track(partitions, cfg_);
    case BaselineMethod::icem:
      return icem_track(partitions, cfg_);
  }
  throw Error("unknown baseline method");
}

}  // namespace commtrack
