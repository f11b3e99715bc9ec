#include "commtrack/benchgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <unordered_set>

#include "commtrack/rng.hpp"

namespace commtrack {
namespace {

constexpr std::array<std::string_view, 4> kRegimeNames{"birthdeath", "expandcontract", "mergesplit", "intermittent"};

// Continuous power law x^-tau on [a, b].
double power_law_sample(Rng& rng, double tau, double a, double b) {
  const double u = rng.uniform();
  if (std::abs(tau - 1.0) < 1e-12) return a * std::pow(b / a, u);
  const double e = 1.0 - tau;
  return std::pow(std::pow(a, e) + u * (std::pow(b, e) - std::pow(a, e)), 1.0 / e);
}

// Integral of x^p over [a, b].
double power_integral(double p, double a, double b) {
  if (std::abs(p + 1.0) < 1e-12) return std::log(b / a);
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

double power_law_mean(double tau, double a, double b) {
  if (b <= a) return a;
  return power_integral(1.0 - tau, a, b) / power_integral(-tau, a, b);
}

// Lower degree bound giving the requested mean.
double solve_min_degree(double tau, double mean, double kmax) {
  double lo = 1.0, hi = kmax;
  if (power_law_mean(tau, lo, kmax) > mean) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (power_law_mean(tau, mid, kmax) < mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Configuration model over `stubs` (one entry per half-edge). Self loops,
// repeated pairs and pairs rejected by `forbidden` are repaired by random
// swaps with accepted edges, and dropped when no swap is found.
template <class Forbidden>
void wire(std::vector<NodeId> stubs, Rng& rng, Forbidden forbidden, std::unordered_set<std::uint64_t>& taken,
          std::vector<std::pair<NodeId, NodeId>>& edges) {
  if (stubs.size() % 2 == 1) stubs.pop_back();
  rng.shuffle(stubs);
  const std::size_t first = edges.size();
  std::vector<std::pair<NodeId, NodeId>> bad;
  auto ok = [&](NodeId u, NodeId v) { return u != v && !forbidden(u, v) && !taken.count(edge_key(u, v)); };
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    const NodeId u = stubs[i], v = stubs[i + 1];
    if (ok(u, v)) {
      taken.insert(edge_key(u, v));
      edges.push_back({u, v});
    } else {
      bad.push_back({u, v});
    }
  }
  for (auto [u, v] : bad) {
    for (int attempt = 0; attempt < 50 && edges.size() > first; ++attempt) {
      const std::size_t e = first + rng.below(edges.size() - first);
      auto [x, y] = edges[e];
      if (rng.below(2)) std::swap(x, y);
      if (edge_key(u, x) == edge_key(v, y)) continue;
      if (u == x || v == y || forbidden(u, x) || forbidden(v, y)) continue;
      if (taken.count(edge_key(u, x)) || taken.count(edge_key(v, y))) continue;
      taken.erase(edge_key(x, y));
      taken.insert(edge_key(u, x));
      taken.insert(edge_key(v, y));
      edges[e] = {u, x};
      edges.push_back({v, y});
      break;
    }
  }
}

class Generator {
 public:
  explicit Generator(const BenchConfig& cfg) : cfg_(cfg), rng_(cfg.seed), label_of_(cfg.nodes, 0) {}

  Benchmark run() {
    Benchmark out;
    for (std::size_t v = 0; v < cfg_.nodes; ++v) out.series.nodes.intern(std::to_string(v));
    draw_degrees();
    initial_communities();
    for (std::uint32_t t = 0; t < cfg_.snapshots; ++t) {
      std::vector<Pending> pending;
      if (t > 0) pending = evolve();
      emit_snapshot(t, out);
      record_events(t, pending, out.truth);
    }
    return out;
  }

 private:
  struct Pending {
    EventKind kind;
    std::uint32_t subject;  // label at t (or t - 1 for death)
    std::vector<std::uint32_t> related;  // labels at t - 1 (split: at t)
  };

  void draw_degrees() {
    const double kmax = static_cast<double>(cfg_.max_degree);
    const double kmin = solve_min_degree(cfg_.degree_exponent, cfg_.avg_degree, kmax);
    degree_.resize(cfg_.nodes);
    for (auto& d : degree_) {
      d = static_cast<std::size_t>(std::lround(power_law_sample(rng_, cfg_.degree_exponent, kmin, kmax)));
      d = std::clamp<std::size_t>(d, 1, cfg_.max_degree);
    }
  }

  std::size_t draw_size() {
    const auto s = power_law_sample(rng_, cfg_.size_exponent, static_cast<double>(cfg_.min_community),
                                    static_cast<double>(cfg_.max_community));
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(s)), cfg_.min_community, cfg_.max_community);
  }

  void initial_communities() {
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
    while (total < cfg_.nodes) {
      sizes.push_back(draw_size());
      total += sizes.back();
    }
    std::size_t excess = total - cfg_.nodes;
    while (excess > 0) {
      std::vector<std::size_t> shrinkable;
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] > cfg_.min_community) shrinkable.push_back(c);
      }
      if (shrinkable.empty()) {
        // Drop the last community and hand its members to the others.
        excess = sizes.back() - excess;
        sizes.pop_back();
        for (std::size_t i = 0; i < excess; ++i) ++sizes[rng_.below(sizes.size())];
        break;
      }
      --sizes[shrinkable[rng_.below(shrinkable.size())]];
      --excess;
    }
    if (sizes.size() < 2) throw Error("benchmark needs at least two communities; add nodes or shrink communities");

    // Highest internal degree first, each into a random community that can
    // hold its internal edges (the largest open one otherwise).
    std::vector<NodeId> order(cfg_.nodes);
    std::iota(order.begin(), order.end(), 0u);
    rng_.shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return degree_[a] > degree_[b]; });
    std::vector<std::size_t> room = sizes;
    for (NodeId v : order) {
      const double need = std::round((1.0 - cfg_.mixing) * static_cast<double>(degree_[v]));
      std::vector<std::uint32_t> fits;
      std::uint32_t largest = UINT32_MAX;
      for (std::uint32_t c = 0; c < sizes.size(); ++c) {
        if (room[c] == 0) continue;
        if (static_cast<double>(sizes[c]) - 1.0 >= need) fits.push_back(c);
        if (largest == UINT32_MAX || sizes[c] > sizes[largest]) largest = c;
      }
      const std::uint32_t c = fits.empty() ? largest : fits[rng_.below(fits.size())];
      --room[c];
      label_of_[v] = c;
      members_[c].push_back(v);
    }
    next_label_ = static_cast<std::uint32_t>(sizes.size());
  }

  std::vector<std::uint32_t> visible_labels() const {
    std::vector<std::uint32_t> out;
    for (const auto& [label, m] : members_) {
      if (!m.empty() && !hidden_.count(label)) out.push_back(label);
    }
    return out;
  }

  // Picks n distinct labels from `pool` (removed from it).
  std::vector<std::uint32_t> take(std::vector<std::uint32_t>& pool, std::size_t n) {
    rng_.shuffle(pool);
    n = std::min(n, pool.size());
    std::vector<std::uint32_t> out(pool.end() - static_cast<std::ptrdiff_t>(n), pool.end());
    pool.resize(pool.size() - n);
    std::sort(out.begin(), out.end());
    return out;
  }

  void move_node(NodeId v, std::uint32_t to) {
    auto& from = members_[label_of_[v]];
    from.erase(std::find(from.begin(), from.end(), v));
    members_[to].push_back(v);
    label_of_[v] = to;
  }

  std::size_t donor_floor() const { return std::max<std::size_t>(3, cfg_.min_community / 2); }

  // Moves up to n random nodes from the communities in `donors` (kept at or
  // above the donor floor) into `to`.
  void pull_nodes(std::uint32_t to, std::size_t n, const std::vector<std::uint32_t>& donors) {
    std::vector<NodeId> pool;
    for (auto d : donors) pool.insert(pool.end(), members_[d].begin(), members_[d].end());
    rng_.shuffle(pool);
    for (NodeId v : pool) {
      if (n == 0) break;
      if (members_[label_of_[v]].size() <= donor_floor()) continue;
      move_node(v, to);
      --n;
    }
  }

  void scatter(std::vector<NodeId> nodes, const std::vector<std::uint32_t>& targets) {
    for (NodeId v : nodes) move_node(v, targets[rng_.below(targets.size())]);
  }

  std::vector<Pending> evolve() {
    const std::vector<std::uint32_t> before = label_of_;
    std::set<std::uint32_t> affected;
    std::vector<Pending> pending;
    std::set<std::uint32_t> was_hidden;
    was_hidden.swap(hidden_);

    auto pool = visible_labels();
    const std::size_t e = cfg_.event_count;
    switch (cfg_.regime) {
      case Regime::birthdeath: {
        const std::size_t n = std::min(e, pool.size() / 2);
        const auto dying = take(pool, n);
        affected.insert(dying.begin(), dying.end());
        for (std::size_t i = 0; i < n; ++i) {
          const std::uint32_t label = next_label_++;
          affected.insert(label);
          pull_nodes(label, draw_size(), pool);
          if (!members_[label].empty()) pending.push_back({EventKind::birth, label, {}});
        }
        for (auto d : dying) {
          auto nodes = members_[d];
          scatter(std::move(nodes), pool);
          pending.push_back({EventKind::death, d, {}});
        }
        break;
      }
      case Regime::expandcontract: {
        const auto chosen = take(pool, std::min(e, pool.size() / 2));
        affected.insert(chosen.begin(), chosen.end());
        for (auto c : chosen) {
          const std::size_t size = members_[c].size();
          const auto delta = static_cast<std::size_t>(std::lround(cfg_.resize_fraction * static_cast<double>(size)));
          if (rng_.below(2) == 0) {
            pull_nodes(c, std::max<std::size_t>(delta, 1), pool);
            pending.push_back({EventKind::growth, c, {c}});
          } else {
            auto nodes = members_[c];
            rng_.shuffle(nodes);
            nodes.resize(std::min(std::max<std::size_t>(delta, 1), size - std::min(size, donor_floor())));
            if (nodes.empty()) continue;
            scatter(std::move(nodes), pool);
            pending.push_back({EventKind::contraction, c, {c}});
          }
        }
        break;
      }
      case Regime::mergesplit: {
        const std::size_t floor = donor_floor();
        std::vector<std::uint32_t> splittable;
        for (auto c : pool) {
          if (members_[c].size() >= 2 * floor) splittable.push_back(c);
        }
        const auto splitting = take(splittable, std::min(e, pool.size() / 3));
        std::erase_if(pool, [&](std::uint32_t c) { return std::binary_search(splitting.begin(), splitting.end(), c); });
        affected.insert(splitting.begin(), splitting.end());
        for (auto c : splitting) {
          auto nodes = members_[c];
          rng_.shuffle(nodes);
          const double share = rng_.uniform(0.3, 0.7);
          auto small = static_cast<std::size_t>(std::lround(share * static_cast<double>(nodes.size())));
          small = std::min(small, nodes.size() - small);
          small = std::clamp(small, floor, nodes.size() - floor);
          const std::uint32_t child = next_label_++;
          affected.insert(child);
          for (std::size_t i = 0; i < small; ++i) move_node(nodes[i], child);
          pending.push_back({EventKind::splitting, c, {c, child}});
        }
        const auto merging = take(pool, std::min(2 * e, pool.size() - pool.size() % 2));
        affected.insert(merging.begin(), merging.end());
        std::vector<std::uint32_t> order = merging;
        rng_.shuffle(order);
        for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
          std::uint32_t keep = order[i], gone = order[i + 1];
          const auto sk = members_[keep].size(), sg = members_[gone].size();
          if (sg > sk || (sg == sk && gone < keep)) std::swap(keep, gone);
          auto nodes = members_[gone];
          for (NodeId v : nodes) move_node(v, keep);
          pending.push_back({EventKind::merging, keep, {std::min(keep, gone), std::max(keep, gone)}});
        }
        break;
      }
      case Regime::intermittent: {
        std::vector<std::uint32_t> candidates;
        for (auto c : pool) {
          if (!was_hidden.count(c)) candidates.push_back(c);
        }
        const auto n = static_cast<std::size_t>(std::lround(cfg_.hidden_fraction * static_cast<double>(pool.size())));
        const auto hide = take(candidates, n);
        hidden_.insert(hide.begin(), hide.end());
        affected.insert(hide.begin(), hide.end());
        break;
      }
    }
    churn(before, affected);
    return pending;
  }

  // Moves round(churn * n) of the n nodes untouched by events to a random
  // other untouched community.
  void churn(const std::vector<std::uint32_t>& before, const std::set<std::uint32_t>& affected) {
    std::vector<std::uint32_t> targets;
    for (auto c : visible_labels()) {
      if (!affected.count(c)) targets.push_back(c);
    }
    if (targets.size() < 2) return;
    std::vector<NodeId> eligible;
    for (NodeId v = 0; v < cfg_.nodes; ++v) {
      if (before[v] == label_of_[v] && !affected.count(label_of_[v]) && !hidden_.count(label_of_[v])) {
        eligible.push_back(v);
      }
    }
    rng_.shuffle(eligible);
    auto quota = static_cast<std::size_t>(std::lround(cfg_.churn * static_cast<double>(eligible.size())));
    for (NodeId v : eligible) {
      if (quota == 0) break;
      if (members_[label_of_[v]].size() <= 2) continue;
      std::uint32_t to = targets[rng_.below(targets.size() - 1)];
      if (to == label_of_[v]) to = targets.back();
      move_node(v, to);
      --quota;
    }
  }

  void emit_snapshot(std::uint32_t t, Benchmark& out) {
    Partition p;
    std::vector<std::uint32_t> labels;
    for (auto c : visible_labels()) {
      auto m = members_[c];
      std::sort(m.begin(), m.end());
      p.communities.push_back(std::move(m));
      labels.push_back(c);
    }

    GraphBuilder builder(cfg_.nodes);
    std::unordered_set<std::uint64_t> taken;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> external;
    for (const auto& m : p.communities) {
      std::vector<NodeId> internal;
      const double cap = static_cast<double>(m.size()) - 1.0;
      for (NodeId v : m) {
        builder.add_vertex(v);
        const double d = static_cast<double>(degree_[v]);
        double in = std::round((1.0 - cfg_.mixing) * d);
        double ext = d - in;
        if (in > cap) {
          // Keep the mixing ratio when the community is too small.
          in = cap;
          ext = std::round(in * cfg_.mixing / (1.0 - cfg_.mixing));
        }
        internal.insert(internal.end(), static_cast<std::size_t>(in), v);
        external.insert(external.end(), static_cast<std::size_t>(ext), v);
      }
      wire(std::move(internal), rng_, [](NodeId, NodeId) { return false; }, taken, edges);
    }
    wire(std::move(external), rng_, [&](NodeId u, NodeId v) { return label_of_[u] == label_of_[v]; }, taken, edges);
    for (auto [u, v] : edges) builder.add_edge(u, v, 1.0);
    out.series.snapshots.push_back({builder.build(), std::to_string(t + 1)});
    out.truth.partitions.push_back(std::move(p));
    out.truth.labels.push_back(std::move(labels));
  }

  void record_events(std::uint32_t t, const std::vector<Pending>& pending, GroundTruth& truth) {
    auto ref = [&](std::uint32_t snap, std::uint32_t label) {
      const auto& ls = truth.labels[snap];
      auto it = std::find(ls.begin(), ls.end(), label);
      if (it == ls.end()) throw Error("internal: planted label missing");
      return CommunityRef{snap, static_cast<std::uint32_t>(it - ls.begin())};
    };
    for (const auto& ev : pending) {
      EventRecord rec{ev.kind, {}, {}, ev.subject};
      switch (ev.kind) {
        case EventKind::death:
          rec.subject = ref(t - 1, ev.subject);
          break;
        case EventKind::birth:
          rec.subject = ref(t, ev.subject);
          break;
        case EventKind::splitting:
          for (auto l : ev.related) rec.related.push_back(ref(t, l));
          // One record per child.
          for (const auto& child : rec.related) {
            EventRecord r = rec;
            r.subject = child;
            r.dyncomm = truth.labels[t][child.community];
            truth.events.push_back(std::move(r));
          }
          continue;
        default:
          rec.subject = ref(t, ev.subject);
          for (auto l : ev.related) rec.related.push_back(ref(t - 1, l));
          break;
      }
      truth.events.push_back(std::move(rec));
    }
  }

  const BenchConfig& cfg_;
  Rng rng_;
  std::vector<std::size_t> degree_;
  std::vector<std::uint32_t> label_of_;
  std::map<std::uint32_t, std::vector<NodeId>> members_;
  std::set<std::uint32_t> hidden_;
  std::uint32_t next_label_ = 0;
};

}  // namespace

std::string_view to_string(Regime regime) { return kRegimeNames[static_cast<std::size_t>(regime)]; }

std::optional<Regime> parse_regime(std::string_view name) {
  for (std::size_t i = 0; i < kRegimeNames.size(); ++i) {
    if (kRegimeNames[i] == name) return static_cast<Regime>(i);
  }
  return std::nullopt;
}

void BenchConfig::validate() const {
  if (nodes < 2 || snapshots < 1) throw Error("benchmark needs at least 2 nodes and 1 snapshot");
  if (!(avg_degree > 0.0) || avg_degree > static_cast<double>(max_degree) || max_degree >= nodes) {
    throw Error("degrees must satisfy 0 < avg_degree <= max_degree < nodes");
  }
  if (!(mixing >= 0.0 && mixing < 1.0)) throw Error("mixing must lie in [0, 1)");
  if (!(churn >= 0.0 && churn < 1.0)) throw Error("churn must lie in [0, 1)");
  if (min_community < 2 || min_community > max_community) {
    throw Error("community size range must satisfy 2 <= min <= max");
  }
  if (max_community > nodes) throw Error("largest community exceeds the node count");
  if (!(hidden_fraction >= 0.0 && hidden_fraction < 1.0)) throw Error("hidden fraction must lie in [0, 1)");
  if (!(resize_fraction > 0.0 && resize_fraction < 1.0)) throw Error("resize fraction must lie in (0, 1)");
  const double kmin = solve_min_degree(degree_exponent, avg_degree, static_cast<double>(max_degree));
  const double need = std::round((1.0 - mixing) * kmin);
  if (need > static_cast<double>(min_community) - 1.0) {
    throw Error("communities of " + std::to_string(min_community) + " nodes cannot hold the " +
                std::to_string(static_cast<long>(need)) + " internal edges of the lowest-degree node");
  }
  if (expected_community_count(*this) < 2.0) throw Error("configuration yields fewer than two communities");
}

double expected_community_count(const BenchConfig& cfg) {
  const double mean = power_law_mean(cfg.size_exponent, static_cast<double>(cfg.min_community),
                                     static_cast<double>(cfg.max_community));
  return static_cast<double>(cfg.nodes) / mean;
}

BenchConfig desk_scale(const BenchConfig& cfg, std::size_t nodes) {
  if (nodes == cfg.nodes) return cfg;
  BenchConfig out = cfg;
  out.nodes = nodes;
  out.max_community = std::max(out.min_community, std::min<std::size_t>(out.max_community, 50));
  if (expected_community_count(out) < 2.0) throw Error("scaled configuration yields fewer than two communities");
  const double ratio = expected_community_count(out) / expected_community_count(cfg);
  out.event_count = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.event_count * ratio)));
  return out;
}

std::uint32_t GroundTruth::label_count() const {
  std::uint32_t n = 0;
  for (const auto& ls : labels) {
    for (auto l : ls) n = std::max(n, l + 1);
  }
  return n;
}

std::vector<CommunityRef> GroundTruth::timeline(std::uint32_t label) const {
  std::vector<CommunityRef> out;
  for (std::uint32_t t = 0; t < labels.size(); ++t) {
    for (std::uint32_t c = 0; c < labels[t].size(); ++c) {
      if (labels[t][c] == label) out.push_back({t, c});
    }
  }
  return out;
}

std::vector<DynamicCommunity> GroundTruth::dynamic_communities() const {
  std::vector<std::vector<CommunityRef>> groups(label_count());
  for (std::uint32_t t = 0; t < labels.size(); ++t) {
    for (std::uint32_t c = 0; c < labels[t].size(); ++c) groups[labels[t][c]].push_back({t, c});
  }
  return assemble_dynamic_communities(std::move(groups), partitions);
}

Benchmark generate(const BenchConfig& cfg) {
  cfg.validate();
  return Generator(cfg).run();
}

void write_truth_labels(std::ostream& out, const GroundTruth& truth) {
  for (std::uint32_t t = 0; t < truth.labels.size(); ++t) {
    for (std::uint32_t c = 0; c < truth.labels[t].size(); ++c) {
      out << truth.labels[t][c] << '\t' << t + 1 << '\t' << c << '\n';
    }
  }
}

}  // namespace commtrack
