#include "commtrack/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_map>

#include "commtrack/io.hpp"
#include "commtrack/louvain.hpp"

namespace commtrack {
namespace {

// Summed over sorted counts so the result does not depend on label values
// (keeps nmi exactly symmetric and permutation invariant).
double entropy(const std::unordered_map<std::uint64_t, std::size_t>& counts, double n) {
  std::vector<std::size_t> sorted;
  sorted.reserve(counts.size());
  for (const auto& [label, c] : counts) sorted.push_back(c);
  std::sort(sorted.begin(), sorted.end());
  double h = 0.0;
  for (auto c : sorted) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

LabelAssignment make_assignment(std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  LabelAssignment out;
  std::unordered_map<std::uint32_t, std::uint32_t> dense;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0 && pairs[i].first == pairs[i - 1].first) throw Error("label assignment repeats a (node, snapshot) key");
    out.keys.push_back(pairs[i].first);
    const auto [it, fresh] = dense.try_emplace(pairs[i].second, static_cast<std::uint32_t>(dense.size()));
    out.labels.push_back(it->second);
  }
  return out;
}

LabelAssignment label_assignment(const SnapshotSeries& series, std::span<const Partition> partitions,
                                 std::span<const DynamicCommunity> communities, std::size_t prefix) {
  if (prefix > series.size()) throw Error("prefix exceeds the number of snapshots");
  constexpr std::uint32_t kUnclustered = UINT32_MAX;
  std::vector<std::vector<std::uint32_t>> label(prefix);
  for (std::uint32_t t = 0; t < prefix; ++t) label[t].assign(series.graph(t).vertex_count(), kUnclustered);
  for (const auto& d : communities) {
    for (const auto& ref : d.timeline) {
      if (ref.snapshot >= prefix) continue;
      for (NodeId v : partitions[ref.snapshot].communities.at(ref.community)) {
        if (v < label[ref.snapshot].size()) label[ref.snapshot][v] = d.id;
      }
    }
  }
  std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
  for (std::uint32_t t = 0; t < prefix; ++t) {
    const Graph& g = series.graph(t);
    for (NodeId v = 0; v < g.vertex_count(); ++v) {
      if (g.contains(v)) pairs.push_back({LabelAssignment::key(v, t), label[t][v]});
    }
  }
  return make_assignment(std::move(pairs));
}

double nmi(const LabelAssignment& x, const LabelAssignment& y) {
  if (x.keys != y.keys) throw Error("NMI needs assignments over the same (node, snapshot) keys");
  if (x.size() == 0) return 1.0;
  std::unordered_map<std::uint64_t, std::size_t> cx, cy, cxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++cx[x.labels[i]];
    ++cy[y.labels[i]];
    ++cxy[(static_cast<std::uint64_t>(x.labels[i]) << 32) | y.labels[i]];
  }
  const double n = static_cast<double>(x.size());
  const double hx = entropy(cx, n), hy = entropy(cy, n), hxy = entropy(cxy, n);
  if (hx + hy <= 0.0) return 1.0;
  const double value = 2.0 * (hx + hy - hxy) / (hx + hy);
  return std::clamp(value, 0.0, 1.0);
}

std::vector<std::size_t> active_counts(std::span<const DynamicCommunity> communities, std::size_t snapshots) {
  std::vector<std::set<std::uint32_t>> active(snapshots);
  for (const auto& d : communities) {
    for (const auto& ref : d.timeline) {
      if (ref.snapshot < snapshots) active[ref.snapshot].insert(d.id);
    }
  }
  std::vector<std::size_t> out;
  for (const auto& s : active) out.push_back(s.size());
  return out;
}

PartitionSeries detect_series(const SnapshotSeries& series, std::uint64_t detector_seed, std::size_t target_count) {
  PartitionSeries out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    const Graph& g = series.graph(t);
    if (g.total_weight() <= 0.0) continue;
    const auto result = detect(g, detector_seed + t);
    out[t] = pick_level(result, target_count);
  }
  return out;
}

std::vector<std::size_t> truth_counts(const GroundTruth& truth) {
  std::vector<std::size_t> out;
  for (const auto& ls : truth.labels) out.push_back(std::set<std::uint32_t>(ls.begin(), ls.end()).size());
  return out;
}

ExperimentReport run_protocol(const SnapshotSeries& series, const PartitionSeries& truth,
                              const DynamicTracker& tracker, std::uint64_t detector_seed,
                              const std::vector<std::size_t>* truth_counts, const PartitionSeries* detected) {
  const std::size_t n = series.size();
  if (truth.size() < n) throw Error("ground truth does not cover every snapshot");
  if (n == 0) throw Error("empty snapshot series");
  ExperimentReport report;
  report.tracker = tracker.name();
  report.detector_seed = detector_seed;

  PartitionSeries found;
  if (detected) {
    if (detected->size() < n) throw Error("detected partitions do not cover every snapshot");
    found = *detected;
  } else {
    found = detect_series(series, detector_seed, truth[0].size());
  }
  const std::span<const Partition> truth_span(truth.data(), n);
  const std::span<const Partition> found_span(found.data(), n);

  std::vector<DynamicCommunity> on_truth, on_found;
  for (std::size_t prefix = 1; prefix <= n; ++prefix) {
    try {
      on_truth = tracker.track(truth_span.first(prefix));
      on_found = tracker.track(found_span.first(prefix));
    } catch (const std::exception& e) {
      throw Error("tracking prefix " + std::to_string(prefix) + ": " + e.what());
    }
    const auto a = label_assignment(series, truth_span, on_truth, prefix);
    const auto b = label_assignment(series, found_span, on_found, prefix);
    report.nmi.push_back(nmi(a, b));
  }
  report.found = active_counts(on_found, n);
  report.found_on_truth = active_counts(on_truth, n);
  report.truth = truth_counts ? *truth_counts : report.found_on_truth;
  return report;
}

ExperimentReport run_protocol(const SnapshotSeries& series, const GroundTruth& truth, const DynamicTracker& tracker,
                              std::uint64_t detector_seed) {
  const auto counts = truth_counts(truth);
  return run_protocol(series, truth.partitions, tracker, detector_seed, &counts);
}

StageTimings time_stages(std::span<const Partition> partitions, std::uint64_t seed, SimilarityMetric metric,
                         unsigned threads, std::size_t repetitions) {
  StageTimings best;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, repetitions); ++r) {
    StageTimings run;
    const auto start = std::chrono::steady_clock::now();
    const auto net = build_similarity_network(partitions, metric, threads);
    run.similarity_seconds = seconds_since(start);
    const auto mid = std::chrono::steady_clock::now();
    const auto comms = track(net, seed);
    run.tracking_seconds = seconds_since(mid);
    run.total_seconds = seconds_since(start);
    run.communities = net.size();
    run.similarity_edges = net.edges.size();
    if (r == 0 || run.total_seconds < best.total_seconds) best = run;
  }
  return best;
}

void write_nmi_csv(std::ostream& out, const ExperimentReport& report) {
  out << "prefix,nmi\n";
  for (std::size_t i = 0; i < report.nmi.size(); ++i) out << i + 1 << ',' << format_double(report.nmi[i]) << '\n';
}

void write_counts_csv(std::ostream& out, const ExperimentReport& report) {
  out << "snapshot,found,truth\n";
  for (std::size_t t = 0; t < report.found.size(); ++t) {
    out << t + 1 << ',' << report.found[t] << ',' << (t < report.truth.size() ? report.truth[t] : 0) << '\n';
  }
}

void write_timings_csv(std::ostream& out, const StageTimings& timings) {
  out << "stage,seconds\n";
  out << "similarity," << format_double(timings.similarity_seconds) << '\n';
  out << "tracking," << format_double(timings.tracking_seconds) << '\n';
  out << "total," << format_double(timings.total_seconds) << '\n';
}

std::string report_json(const ExperimentReport& report) {
  nlohmann::json doc;
  doc["tracker"] = report.tracker;
  doc["detector_seed"] = report.detector_seed;
  doc["nmi"] = report.nmi;
  doc["counts"] = {{"found", report.found}, {"found_on_truth", report.found_on_truth}, {"truth", report.truth}};
  if (report.timings) {
    const auto& t = *report.timings;
    doc["timings"] = {{"similarity_seconds", t.similarity_seconds},
                      {"tracking_seconds", t.tracking_seconds},
                      {"total_seconds", t.total_seconds},
                      {"communities", t.communities},
                      {"similarity_edges", t.similarity_edges}};
  }
#if defined(__VERSION__)
  const char* compiler = __VERSION__;
#else
  const char* compiler = "unknown";
#endif
  doc["machine"] = {{"hardware_threads", std::thread::hardware_concurrency()}, {"compiler", compiler}};
  return doc.dump(2);
}

}  // namespace commtrack
