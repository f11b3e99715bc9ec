#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "commtrack/baselines.hpp"
#include "commtrack/benchgen.hpp"
#include "commtrack/eval.hpp"
#include "commtrack/events.hpp"
#include "commtrack/io.hpp"
#include "commtrack/louvain.hpp"
#include "commtrack/simnet.hpp"
#include "commtrack/social.hpp"
#include "commtrack/tracker.hpp"

namespace py = pybind11;
using namespace commtrack;

namespace {

using Communities = std::vector<std::vector<NodeId>>;

PartitionSeries to_partitions(const std::vector<Communities>& raw) {
  PartitionSeries out(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    out[t].communities = raw[t];
    out[t].normalize();
  }
  return out;
}

std::vector<Communities> from_partitions(const PartitionSeries& parts) {
  std::vector<Communities> out;
  out.reserve(parts.size());
  for (const auto& p : parts) out.push_back(p.communities);
  return out;
}

template <class T>
std::vector<T>& sorted_set(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

using Ref = std::pair<std::uint32_t, std::uint32_t>;

py::dict community_dict(const DynamicCommunity& d) {
  py::dict r;
  r["id"] = d.id;
  std::vector<Ref> timeline;
  for (const auto& c : d.timeline) timeline.emplace_back(c.snapshot, c.community);
  r["timeline"] = timeline;
  r["first_snapshot"] = d.first_snapshot;
  r["last_snapshot"] = d.last_snapshot;
  r["nodes"] = d.nodes;
  return r;
}

py::list community_list(const std::vector<DynamicCommunity>& comms) {
  py::list out;
  for (const auto& d : comms) out.append(community_dict(d));
  return out;
}

std::vector<DynamicCommunity> communities_from(const py::list& raw, const PartitionSeries& parts) {
  std::vector<std::vector<CommunityRef>> groups;
  for (const auto& item : raw) {
    std::vector<CommunityRef> g;
    for (const auto& r : item.cast<py::dict>()["timeline"].cast<std::vector<Ref>>()) g.push_back({r.first, r.second});
    groups.push_back(std::move(g));
  }
  return assemble_dynamic_communities(std::move(groups), parts);
}

SimilarityMetric metric_of(const std::string& name) {
  if (name == "overlap") return SimilarityMetric::overlap;
  if (name == "jaccard") return SimilarityMetric::jaccard;
  throw py::value_error("metric must be 'overlap' or 'jaccard'");
}

BaselineConfig baseline_of(const std::string& method, std::optional<double> k, std::optional<double> secondary,
                           std::optional<std::size_t> d) {
  auto m = parse_baseline_method(method);
  if (!m) throw py::value_error("unknown baseline method: " + method);
  auto cfg = BaselineConfig::evaluated(*m);
  if (k) cfg.k = *k;
  if (secondary) cfg.secondary = *secondary;
  cfg.dissolve_after = d;
  cfg.validate();
  return cfg;
}

py::dict report_dict(const ExperimentReport& r) {
  py::dict out;
  out["tracker"] = r.tracker;
  out["detector_seed"] = r.detector_seed;
  out["nmi"] = r.nmi;
  out["found"] = r.found;
  out["found_on_truth"] = r.found_on_truth;
  out["truth"] = r.truth;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dynamic community tracking on snapshot series";
  m.attr("__version__") = COMMTRACK_VERSION;

  py::register_exception<Error>(m, "CommtrackError", PyExc_ValueError);

  py::class_<SnapshotSeries>(m, "SnapshotSeries")
      .def("__len__", &SnapshotSeries::size)
      .def_property_readonly("node_count", [](const SnapshotSeries& s) { return s.nodes.size(); })
      .def("node_label", [](const SnapshotSeries& s, NodeId id) { return s.nodes.label(id); })
      .def("node_id",
           [](const SnapshotSeries& s, const std::string& label) -> std::optional<NodeId> {
             auto id = s.nodes.find(label);
             if (id < 0) return std::nullopt;
             return static_cast<NodeId>(id);
           })
      .def("snapshot_label", [](const SnapshotSeries& s, std::size_t t) { return s.snapshots.at(t).label; })
      .def("edges",
           [](const SnapshotSeries& s, std::size_t t) {
             std::vector<std::tuple<NodeId, NodeId, double>> out;
             s.graph(t).for_each_edge([&](NodeId u, NodeId v, double w) { out.emplace_back(u, v, w); });
             return out;
           },
           py::arg("snapshot"))
      .def("present", [](const SnapshotSeries& s, std::size_t t) { return s.graph(t).present_vertices(); })
      .def("to_text", [](const SnapshotSeries& s) {
        std::ostringstream os;
        write_snapshots(os, s);
        return os.str();
      });

  m.def("load_snapshots", [](const std::filesystem::path& p) { return load_snapshots(p); }, py::arg("path"));
  m.def(
      "parse_snapshots",
      [](const std::string& text) {
        std::istringstream in(text);
        return read_snapshots(in);
      },
      py::arg("text"), "Edge list text: `snapshot u v [weight]` per line.");
  m.def(
      "load_partitions",
      [](const std::filesystem::path& p, const SnapshotSeries& s) { return from_partitions(load_partitions(p, s)); },
      py::arg("path"), py::arg("series"));
  m.def(
      "partitions_to_text",
      [](const std::vector<Communities>& parts, const SnapshotSeries& s) {
        std::ostringstream os;
        write_partitions(os, to_partitions(parts), s.nodes);
        return os.str();
      },
      py::arg("partitions"), py::arg("series"));

  m.def(
      "overlap_coefficient",
      [](std::vector<NodeId> a, std::vector<NodeId> b) { return overlap_coefficient(sorted_set(a), sorted_set(b)); },
      py::arg("a"), py::arg("b"));
  m.def(
      "jaccard", [](std::vector<NodeId> a, std::vector<NodeId> b) { return jaccard(sorted_set(a), sorted_set(b)); },
      py::arg("a"), py::arg("b"));

  m.def(
      "modularity",
      [](const SnapshotSeries& s, std::size_t t, const Communities& comms) {
        Partition p{comms};
        p.normalize();
        return modularity(s.graph(t), p);
      },
      py::arg("series"), py::arg("snapshot"), py::arg("communities"));
  m.def(
      "detect",
      [](const SnapshotSeries& s, std::uint64_t seed) {
        PartitionSeries parts(s.size());
        for (std::size_t t = 0; t < s.size(); ++t)
          if (s.graph(t).edge_count() > 0) parts[t] = detect(s.graph(t), seed + t).levels.back();
        return from_partitions(parts);
      },
      py::arg("series"), py::arg("seed") = 42, "Final Louvain level of every snapshot, seed + t per snapshot.");
  m.def(
      "detect_series",
      [](const SnapshotSeries& s, std::uint64_t seed, std::size_t target) {
        return from_partitions(detect_series(s, seed, target));
      },
      py::arg("series"), py::arg("seed"), py::arg("target_count"));

  m.def(
      "similarity_edges",
      [](const std::vector<Communities>& raw, const std::string& metric) {
        auto net = build_similarity_network(to_partitions(raw), metric_of(metric));
        std::vector<std::tuple<Ref, Ref, double>> out;
        for (const auto& e : net.edges) {
          const auto& a = net.vertices[e.a];
          const auto& b = net.vertices[e.b];
          out.emplace_back(Ref{a.snapshot, a.community}, Ref{b.snapshot, b.community}, e.weight);
        }
        return out;
      },
      py::arg("partitions"), py::arg("metric") = "overlap");
  m.def(
      "track",
      [](const std::vector<Communities>& raw, std::uint64_t seed, const std::string& metric, unsigned threads) {
        return community_list(ModularityTracker(seed, metric_of(metric), threads).track(to_partitions(raw)));
      },
      py::arg("partitions"), py::arg("seed") = 42, py::arg("metric") = "overlap", py::arg("threads") = 1);
  m.def(
      "baseline_track",
      [](const std::string& method, const std::vector<Communities>& raw, std::optional<double> k,
         std::optional<double> secondary, std::optional<std::size_t> d, const SnapshotSeries* series) {
        auto cfg = baseline_of(method, k, secondary, d);
        if (cfg.method == BaselineMethod::ged && !series) throw py::value_error("ged needs the snapshot series");
        return community_list(BaselineTracker(cfg, series).track(to_partitions(raw)));
      },
      py::arg("method"), py::arg("partitions"), py::arg("k") = py::none(), py::arg("secondary") = py::none(),
      py::arg("d") = py::none(), py::arg("series") = py::none(),
      "Evaluated settings unless overridden; `secondary` is GED's j or ICEM's v; d=None never dissolves.");
  m.def(
      "events",
      [](const py::list& comms, const std::vector<Communities>& raw) {
        auto parts = to_partitions(raw);
        py::list out;
        for (const auto& e : reconstruct_all(communities_from(comms, parts), parts)) {
          py::dict d;
          d["kind"] = std::string(to_string(e.kind));
          d["subject"] = Ref{e.subject.snapshot, e.subject.community};
          std::vector<Ref> related;
          for (const auto& r : e.related) related.emplace_back(r.snapshot, r.community);
          d["related"] = related;
          d["dyncomm"] = e.dyncomm;
          out.append(d);
        }
        return out;
      },
      py::arg("communities"), py::arg("partitions"));

  m.def(
      "nmi",
      [](const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& y) {
        if (x.size() != y.size()) throw py::value_error("label vectors differ in length");
        std::vector<std::pair<std::uint64_t, std::uint32_t>> a, b;
        for (NodeId i = 0; i < x.size(); ++i) {
          a.emplace_back(LabelAssignment::key(i, 0), x[i]);
          b.emplace_back(LabelAssignment::key(i, 0), y[i]);
        }
        return nmi(make_assignment(std::move(a)), make_assignment(std::move(b)));
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "generate_benchmark",
      [](const std::string& regime, std::size_t nodes, std::size_t snapshots, double mu, double churn,
         std::uint64_t seed) {
        auto r = parse_regime(regime);
        if (!r) throw py::value_error("unknown regime: " + regime);
        BenchConfig cfg;
        cfg.regime = *r;
        cfg.seed = seed;
        cfg.snapshots = snapshots;
        cfg.mixing = mu;
        cfg.churn = churn;
        cfg = desk_scale(cfg, nodes);
        auto b = generate(cfg);
        py::dict out;
        out["series"] = std::move(b.series);
        out["partitions"] = from_partitions(b.truth.partitions);
        out["labels"] = b.truth.labels;
        out["truth_counts"] = truth_counts(b.truth);
        return out;
      },
      py::arg("regime") = "birthdeath", py::arg("nodes") = 1000, py::arg("snapshots") = 5, py::arg("mu") = 0.2,
      py::arg("churn") = 0.2, py::arg("seed") = 42);

  m.def(
      "run_protocol",
      [](const SnapshotSeries& s, const std::vector<Communities>& truth, const std::string& tracker,
         std::uint64_t seed, std::optional<std::vector<std::size_t>> counts) {
        std::unique_ptr<DynamicTracker> t;
        if (tracker == "modularity")
          t = std::make_unique<ModularityTracker>(seed);
        else
          t = std::make_unique<BaselineTracker>(baseline_of(tracker, {}, {}, {}), &s);
        return report_dict(run_protocol(s, to_partitions(truth), *t, seed, counts ? &*counts : nullptr));
      },
      py::arg("series"), py::arg("truth"), py::arg("tracker") = "modularity", py::arg("seed") = 42,
      py::arg("truth_counts") = py::none());

  m.def("hashtags_overlap",
        [](std::vector<std::string> a, std::vector<std::string> b) {
          return hashtags_overlap(sorted_set(a), sorted_set(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("parse_utc_day", &parse_utc_day, py::arg("text"));
}
