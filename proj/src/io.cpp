#include "commtrack/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace commtrack {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

std::size_t parse_snapshot(std::string_view field, std::size_t line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value <= 0) {
    throw ParseError(line, "snapshot index must be a positive integer, got '" + std::string(field) + "'");
  }
  return static_cast<std::size_t>(value);
}

double parse_weight(std::string_view field, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, "malformed weight '" + std::string(field) + "'");
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

SnapshotSeries read_snapshots(std::istream& in, const LoadOptions& options, LoadReport* report) {
  struct RawEdge {
    NodeId u, v;
    double w;
    std::size_t line;
  };
  SnapshotSeries series;
  std::map<std::size_t, std::vector<RawEdge>> edges;
  std::map<std::size_t, std::vector<NodeId>> isolated;
  LoadReport local;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() < 2 || fields.size() > 4) {
      throw ParseError(lineno, "expected 'snapshot u v [weight]'");
    }
    const std::size_t snap = parse_snapshot(fields[0], lineno);
    const NodeId u = series.nodes.intern(fields[1]);
    if (fields.size() == 2) {
      isolated[snap].push_back(u);
      edges[snap];
      continue;
    }
    const NodeId v = series.nodes.intern(fields[2]);
    const double w = fields.size() == 4 ? parse_weight(fields[3], lineno) : 1.0;
    if (u == v && !options.allow_self_loops) throw ParseError(lineno, "self-loop rejected on node '" + std::string(fields[1]) + "'");
    if (!(w >= 0.0) || w == std::numeric_limits<double>::infinity()) {
      throw ParseError(lineno, "edge weight must be finite and nonnegative");
    }
    edges[snap].push_back({u, v, w, lineno});
    ++local.edges;
  }
  local.lines = lineno;
  if (edges.empty()) throw Error("empty snapshot file");
  const std::size_t last = edges.rbegin()->first;
  if (edges.size() != last) {
    for (std::size_t s = 1; s <= last; ++s) {
      if (!edges.count(s)) throw Error("snapshot indices are not contiguous: snapshot " + std::to_string(s) + " is missing");
    }
  }

  const std::size_t n = series.nodes.size();
  for (auto& [snap, list] : edges) {
    GraphBuilder builder(n, options.allow_self_loops);
    for (NodeId v : isolated[snap]) builder.add_vertex(v);
    for (const auto& e : list) {
      if (options.duplicates == DuplicatePolicy::reject && builder.has_edge(e.u, e.v)) {
        throw ParseError(e.line, "duplicate edge");
      }
      builder.add_edge(e.u, e.v, e.w);
    }
    local.duplicate_edges += builder.duplicate_count();
    series.snapshots.push_back({builder.build(), std::to_string(snap)});
  }
  if (report) *report = local;
  return series;
}

SnapshotSeries load_snapshots(const std::filesystem::path& path, const LoadOptions& options, LoadReport* report) {
  auto in = open_input(path);
  return read_snapshots(in, options, report);
}

void write_snapshots(std::ostream& out, const SnapshotSeries& series) {
  for (std::size_t s = 0; s < series.size(); ++s) {
    const Graph& g = series.graph(s);
    for (NodeId v = 0; v < g.vertex_count(); ++v) {
      if (g.contains(v) && g.neighbors(v).empty() && g.self_loop(v) == 0.0) {
        out << s + 1 << '\t' << series.nodes.label(v) << '\n';
      }
      if (g.self_loop(v) != 0.0) {
        out << s + 1 << '\t' << series.nodes.label(v) << '\t' << series.nodes.label(v) << '\t'
            << format_double(g.self_loop(v) / 2.0) << '\n';
      }
    }
    g.for_each_edge([&](NodeId u, NodeId v, double w) {
      out << s + 1 << '\t' << series.nodes.label(u) << '\t' << series.nodes.label(v) << '\t' << format_double(w)
          << '\n';
    });
  }
}

PartitionSeries read_partitions(std::istream& in, const SnapshotSeries& series) {
  PartitionSeries parts(series.size());
  std::vector<std::unordered_map<std::string, std::size_t>> community_slot(series.size());
  std::vector<std::unordered_map<NodeId, std::string>> owner(series.size());
  std::vector<std::string> missing;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank_or_comment(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 3) throw ParseError(lineno, "expected 'snapshot community node'");
    const std::size_t snap = parse_snapshot(fields[0], lineno);
    if (snap > series.size()) {
      throw ParseError(lineno, "snapshot " + std::to_string(snap) + " not in series of " + std::to_string(series.size()));
    }
    const std::size_t s = snap - 1;
    const std::int64_t id = series.nodes.find(fields[2]);
    if (id < 0 || !series.graph(s).contains(static_cast<NodeId>(id))) {
      missing.push_back(std::string(fields[2]) + "@" + std::to_string(snap));
      continue;
    }
    const auto node = static_cast<NodeId>(id);
    std::string community(fields[1]);
    auto [it, fresh] = owner[s].try_emplace(node, community);
    if (!fresh) {
      if (it->second == community) continue;
      throw ParseError(lineno, "node '" + std::string(fields[2]) + "' assigned to communities '" + it->second +
                                   "' and '" + community + "' in snapshot " + std::to_string(snap) +
                                   ": overlapping partitions unsupported");
    }
    auto [slot, added] = community_slot[s].try_emplace(community, parts[s].communities.size());
    if (added) parts[s].communities.emplace_back();
    parts[s].communities[slot->second].push_back(node);
  }
  if (!missing.empty()) {
    std::string msg = "partition references nodes absent from their snapshot:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(msg);
  }
  for (auto& p : parts) {
    for (auto& c : p.communities) std::sort(c.begin(), c.end());
  }
  return parts;
}

PartitionSeries load_partitions(const std::filesystem::path& path, const SnapshotSeries& series) {
  auto in = open_input(path);
  return read_partitions(in, series);
}

void write_partitions(std::ostream& out, const PartitionSeries& partitions, const NodeIndex& nodes) {
  for (std::size_t s = 0; s < partitions.size(); ++s) {
    const auto& p = partitions[s];
    for (std::size_t c = 0; c < p.communities.size(); ++c) {
      for (NodeId v : p.communities[c]) out << s + 1 << '\t' << c << '\t' << nodes.label(v) << '\n';
    }
  }
}

}  // namespace commtrack
