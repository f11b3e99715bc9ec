#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "commtrack/eval.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace commtrack;
using namespace testsupport;

namespace {

LabelAssignment flat(const std::vector<std::uint32_t>& labels) {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
  for (NodeId v = 0; v < labels.size(); ++v) pairs.push_back({LabelAssignment::key(v, 0), labels[v]});
  return make_assignment(std::move(pairs));
}

LabelAssignment relabel(const LabelAssignment& a, const std::vector<std::uint32_t>& perm) {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) pairs.push_back({a.keys[i], perm[a.labels[i]]});
  return make_assignment(std::move(pairs));
}

// Textbook NMI over label vectors, long double.
long double nmi_oracle(const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& y) {
  std::map<std::uint32_t, long double> px, py;
  std::map<std::pair<std::uint32_t, std::uint32_t>, long double> pxy;
  const long double n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    px[x[i]] += 1 / n;
    py[y[i]] += 1 / n;
    pxy[{x[i], y[i]}] += 1 / n;
  }
  auto h = [](const auto& m) {
    long double s = 0;
    for (const auto& [k, p] : m) s -= p * std::log(p);
    return s;
  };
  const long double hx = h(px), hy = h(py), hxy = h(pxy);
  if (hx + hy == 0) return 1;
  return 2 * (hx + hy - hxy) / (hx + hy);
}

BenchConfig small_bench(Regime r, std::uint64_t seed) {
  BenchConfig cfg;
  cfg.regime = r;
  cfg.seed = seed;
  cfg = desk_scale(cfg);
  cfg.snapshots = 3;
  return cfg;
}

}  // namespace

TEST_CASE("nmi worked examples") {
  auto x = flat({0, 0, 1, 1});
  CHECK(nmi(x, x) == 1.0);
  CHECK(nmi(flat({0, 0, 0, 0}), flat({0, 1, 2, 3})) == 0.0);
  CHECK(nmi(flat({0, 0, 1, 1}), flat({0, 1, 0, 1})) == 0.0);
  // Both single-cluster: defined as 1.
  CHECK(nmi(flat({4, 4, 4}), flat({9, 9, 9})) == 1.0);
}

TEST_CASE("nmi rejects mismatched keys") {
  auto a = flat({0, 1, 2});
  auto b = make_assignment({{LabelAssignment::key(0, 0), 0}, {LabelAssignment::key(1, 0), 0},
                            {LabelAssignment::key(2, 1), 1}});
  CHECK_THROWS_AS(nmi(a, b), Error);
  CHECK_THROWS_AS(nmi(a, flat({0, 1})), Error);
  CHECK_THROWS_AS(make_assignment({{1, 0}, {1, 1}}), Error);
}

TEST_CASE("make_assignment sorts keys and densifies labels") {
  auto a = make_assignment({{LabelAssignment::key(5, 1), 70}, {LabelAssignment::key(2, 0), 70},
                            {LabelAssignment::key(1, 1), 3}});
  CHECK(std::is_sorted(a.keys.begin(), a.keys.end()));
  for (auto l : a.labels) CHECK(l < 2);
  CHECK(a.labels[0] == a.labels[2]);
}

TEST_CASE("property: nmi symmetry, permutation invariance, range on fuzzed pairs") {
  Rng rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    const std::size_t kx = 1 + rng.below(8), ky = 1 + rng.below(8);
    std::vector<std::uint32_t> xl(n), yl(n);
    for (auto& l : xl) l = static_cast<std::uint32_t>(rng.below(kx));
    for (auto& l : yl) l = static_cast<std::uint32_t>(rng.below(ky));
    auto x = flat(xl), y = flat(yl);
    const double v = nmi(x, y);
    CHECK(v == nmi(y, x));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    rng.shuffle(perm);
    CHECK(nmi(relabel(x, perm), y) == v);
    CHECK(v == doctest::Approx(static_cast<double>(nmi_oracle(xl, yl))).epsilon(1e-9));
  }
}

TEST_CASE("label_assignment gives unclustered nodes a shared label") {
  PartitionSeries parts(2);
  parts[0].communities = {{0, 1}, {2}};
  parts[1].communities = {{0, 1}};
  auto present = parts;
  present[1].communities.push_back({2});
  // Node 2 is present at snapshot 1 but left out of the tracked partition.
  auto series = series_for(present);
  std::vector<DynamicCommunity> comms{dynamic_of({{0, 0}, {1, 0}}, parts, 0), dynamic_of({{0, 1}}, parts, 1)};
  auto a = label_assignment(series, parts, comms, 2);
  REQUIRE(a.size() == 6);
  // Keys sort by snapshot then node: the last key is (2, 1).
  CHECK(a.labels[5] != a.labels[2]);
  CHECK(a.labels[5] != a.labels[0]);
  auto b = label_assignment(series, parts, comms, 1);
  CHECK(b.size() == 3);
  CHECK_THROWS_AS(label_assignment(series, parts, comms, 3), Error);
  auto none = label_assignment(series, parts, {}, 1);
  CHECK(std::set<std::uint32_t>(none.labels.begin(), none.labels.end()).size() == 1);
}

TEST_CASE("active_counts") {
  PartitionSeries parts(3);
  parts[0].communities = {{0}, {1}};
  parts[1].communities = {{0}};
  parts[2].communities = {{0}, {1}};
  std::vector<DynamicCommunity> comms{dynamic_of({{0, 0}, {1, 0}, {2, 0}}, parts, 0),
                                      dynamic_of({{0, 1}, {2, 1}}, parts, 1)};
  CHECK(active_counts(comms, 3) == std::vector<std::size_t>{2, 1, 2});
}

TEST_CASE("perfect detector gives NMI 1 at every prefix") {
  auto b = generate(small_bench(Regime::mergesplit, 3));
  ModularityTracker tracker;
  auto report = run_protocol(b.series, b.truth.partitions, tracker, 1, nullptr, &b.truth.partitions);
  REQUIRE(report.nmi.size() == 3);
  for (double v : report.nmi) CHECK(v == doctest::Approx(1.0));
  CHECK(report.found == report.found_on_truth);
}

TEST_CASE("prefix 1 reduces to static NMI of the first snapshot") {
  auto b = generate(small_bench(Regime::birthdeath, 4));
  ModularityTracker tracker;
  auto report = run_protocol(b.series, b.truth, tracker, 11);
  auto detected = detect_series(b.series, 11, b.truth.partitions[0].size());
  const auto n = b.series.graph(0).vertex_count();
  auto truth_labels = labels_of(b.truth.partitions[0], n);
  auto found_labels = labels_of(detected[0], n);
  std::vector<std::uint32_t> tx, fx;
  for (NodeId v = 0; v < n; ++v) {
    if (!b.series.graph(0).contains(v)) continue;
    tx.push_back(truth_labels[v]);
    fx.push_back(found_labels[v]);
  }
  CHECK(report.nmi[0] == doctest::Approx(nmi(flat(tx), flat(fx))).epsilon(1e-12));
}

TEST_CASE("run_protocol is deterministic and reports counts") {
  auto b = generate(small_bench(Regime::expandcontract, 5));
  ModularityTracker tracker(9);
  auto r1 = run_protocol(b.series, b.truth, tracker, 2);
  auto r2 = run_protocol(b.series, b.truth, tracker, 2);
  CHECK(r1.nmi == r2.nmi);
  CHECK(r1.found == r2.found);
  CHECK(r1.truth == truth_counts(b.truth));
  CHECK(r1.tracker == "modularity");
  CHECK(r1.detector_seed == 2);
  for (double v : r1.nmi) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  PartitionSeries short_truth(1);
  CHECK_THROWS_AS(run_protocol(b.series, short_truth, tracker, 2), Error);
}

TEST_CASE("report writers") {
  ExperimentReport r;
  r.tracker = "modularity";
  r.detector_seed = 3;
  r.nmi = {1.0, 0.5};
  r.found = {4, 5};
  r.found_on_truth = {4, 4};
  r.truth = {4, 6};
  std::ostringstream nmi_csv, counts_csv, timings_csv;
  write_nmi_csv(nmi_csv, r);
  CHECK(nmi_csv.str() == "prefix,nmi\n1,1\n2,0.5\n");
  write_counts_csv(counts_csv, r);
  CHECK(counts_csv.str() == "snapshot,found,truth\n1,4,4\n2,5,6\n");
  StageTimings t;
  t.similarity_seconds = 0.25;
  t.tracking_seconds = 0.5;
  t.total_seconds = 0.75;
  write_timings_csv(timings_csv, t);
  CHECK(timings_csv.str() == "stage,seconds\nsimilarity,0.25\ntracking,0.5\ntotal,0.75\n");
  r.timings = t;
  auto doc = nlohmann::json::parse(report_json(r));
  CHECK(doc["nmi"][1] == 0.5);
  CHECK(doc["counts"]["truth"][1] == 6);
  CHECK(doc["timings"]["total_seconds"] == 0.75);
  CHECK(doc.contains("machine"));
}

TEST_CASE("time_stages counts communities") {
  Rng rng(52);
  auto parts = random_partitions(rng, 4, 200, 20);
  auto t = time_stages(parts, 1, SimilarityMetric::overlap, 1, 2);
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  CHECK(t.communities == total);
  CHECK(t.similarity_edges == build_similarity_network(parts).edges.size());
  CHECK(t.total_seconds >= t.tracking_seconds);
}
