#include "commtrack/tracker.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "commtrack/louvain.hpp"

namespace commtrack {

std::vector<DynamicCommunity> assemble_dynamic_communities(std::vector<std::vector<CommunityRef>> groups,
                                                           std::span<const Partition> partitions) {
  std::vector<DynamicCommunity> out;
  for (auto& g : groups) {
    if (g.empty()) continue;
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    DynamicCommunity d;
    d.timeline = std::move(g);
    d.first_snapshot = d.timeline.front().snapshot;
    d.last_snapshot = d.timeline.back().snapshot;
    for (const auto& ref : d.timeline) {
      const auto& members = partitions[ref.snapshot].communities.at(ref.community);
      d.nodes.insert(d.nodes.end(), members.begin(), members.end());
    }
    std::sort(d.nodes.begin(), d.nodes.end());
    d.nodes.erase(std::unique(d.nodes.begin(), d.nodes.end()), d.nodes.end());
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const DynamicCommunity& a, const DynamicCommunity& b) {
    if (a.first_snapshot != b.first_snapshot) return a.first_snapshot < b.first_snapshot;
    if (a.timeline.size() != b.timeline.size()) return a.timeline.size() > b.timeline.size();
    return a.timeline.front() < b.timeline.front();
  });
  for (std::uint32_t i = 0; i < out.size(); ++i) out[i].id = i;
  return out;
}

std::vector<std::vector<std::uint32_t>> cluster_similarity_network(const SimilarityNetwork& net, std::uint64_t seed) {
  const Graph g = net.to_graph();
  ModularityState state(g);
  LocalMoveOptions options;
  options.seed = seed;
  local_moving(state, options);

  std::map<CommunityId, std::vector<std::uint32_t>> clusters;
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) clusters[state.community_of(v)].push_back(v);
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(clusters.size());
  for (auto& [id, vs] : clusters) out.push_back(std::move(vs));
  return out;
}

std::vector<DynamicCommunity> track(const SimilarityNetwork& net, std::uint64_t seed) {
  std::vector<std::vector<CommunityRef>> groups;
  for (const auto& cluster : cluster_similarity_network(net, seed)) {
    auto& g = groups.emplace_back();
    for (auto v : cluster) g.push_back(net.vertices[v]);
  }
  // Rebuild a partition view over net.members to compute node unions.
  PartitionSeries parts(net.snapshot_count());
  for (std::size_t v = 0; v < net.size(); ++v) parts[net.vertices[v].snapshot].communities.push_back(net.members[v]);
  return assemble_dynamic_communities(std::move(groups), parts);
}

std::vector<DynamicCommunity> ModularityTracker::track(std::span<const Partition> partitions) const {
  const auto net = build_similarity_network(partitions, metric_, threads_);
  return commtrack::track(net, seed_);
}

void write_dynamic_tsv(std::ostream& out, std::span<const DynamicCommunity> communities) {
  for (const auto& d : communities) {
    for (const auto& ref : d.timeline) out << d.id << '\t' << ref.snapshot + 1 << '\t' << ref.community << '\n';
  }
}

std::string dynamic_communities_json(std::span<const DynamicCommunity> communities, const NodeIndex* nodes) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& d : communities) {
    nlohmann::json timeline = nlohmann::json::array();
    for (const auto& ref : d.timeline) timeline.push_back({{"snapshot", ref.snapshot + 1}, {"community", ref.community}});
    nlohmann::json members = nlohmann::json::array();
    for (NodeId v : d.nodes) {
      if (nodes) {
        members.push_back(nodes->label(v));
      } else {
        members.push_back(v);
      }
    }
    doc.push_back({{"dyncomm", d.id},
                   {"first_snapshot", d.first_snapshot + 1},
                   {"last_snapshot", d.last_snapshot + 1},
                   {"timeline", std::move(timeline)},
                   {"nodes", std::move(members)}});
  }
  return doc.dump(2);
}

std::vector<std::vector<CommunityRef>> read_dynamic_tsv(std::istream& in) {
  std::map<long long, std::vector<CommunityRef>> groups;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    long long id = 0, snapshot = 0, community = 0;
    if (!(fields >> id >> snapshot >> community) || snapshot <= 0 || community < 0) {
      throw Error("line " + std::to_string(lineno) + ": expected 'dyncomm snapshot community'");
    }
    groups[id].push_back({static_cast<std::uint32_t>(snapshot - 1), static_cast<std::uint32_t>(community)});
  }
  std::vector<std::vector<CommunityRef>> out;
  for (auto& [id, refs] : groups) out.push_back(std::move(refs));
  return out;
}

}  // namespace commtrack
