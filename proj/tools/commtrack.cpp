#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <thread>

#include "commtrack/baselines.hpp"
#include "commtrack/benchgen.hpp"
#include "commtrack/eval.hpp"
#include "commtrack/events.hpp"
#include "commtrack/io.hpp"
#include "commtrack/louvain.hpp"
#include "commtrack/simnet.hpp"
#include "commtrack/social.hpp"
#include "commtrack/tracker.hpp"

#ifndef COMMTRACK_VERSION
#define COMMTRACK_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace commtrack;
using nlohmann::json;

namespace {

// Failure inside a named pipeline stage; reported as "stage: message".
struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& what) : std::runtime_error(what), stage(std::move(stage)) {}
  std::string stage;
};

int log_level() {
  const char* env = std::getenv("COMMTRACK_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet" || v == "0" || v == "off") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void log(int level, const std::string& msg) {
  if (level <= log_level()) std::cerr << "[commtrack] " << msg << '\n';
}

template <class F>
auto stage(const std::string& name, F&& f) {
  log(2, "stage " + name);
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

struct Common {
  std::string in;
  std::string parts;
  std::string out_dir = ".";
  std::string seed_text = "42";
  unsigned threads = 1;
  std::string metric = "overlap";

  std::uint64_t seed() const {
    if (seed_text == "random") return (std::uint64_t{std::random_device{}()} << 32) | std::random_device{}();
    return std::stoull(seed_text);
  }
  SimilarityMetric similarity_metric() const {
    return metric == "jaccard" ? SimilarityMetric::jaccard : SimilarityMetric::overlap;
  }
};

const auto seed_check = CLI::Validator(
    [](std::string& s) -> std::string {
      if (s == "random") return {};
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return "seed must be an integer or 'random'";
      try {
        (void)std::stoull(s);
      } catch (const std::exception&) {
        return "seed out of range";
      }
      return {};
    },
    "UINT|random");

const auto window_check = CLI::Validator(
    [](std::string& s) -> std::string {
      if (s == "inf" || (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos)) return {};
      return "window must be a nonnegative integer or 'inf'";
    },
    "UINT|inf");

class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StageError("output", "cannot create " + dir_.string() + ": " + ec.message());
  }

  template <class F>
  void write(const std::string& name, F&& body) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StageError("output", "cannot open " + path.string());
    body(out);
    out.flush();
    if (!out) throw StageError("output", "write failed for " + path.string());
    files_.push_back(path.string());
    log(1, "wrote " + path.string());
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(Outputs& out, const std::string& subcommand, const Common& c, std::uint64_t seed, json config) {
  json m;
  m["subcommand"] = subcommand;
  m["tool_version"] = COMMTRACK_VERSION;
  m["created_utc"] = utc_now();
  m["inputs"] = json::object();
  if (!c.in.empty()) m["inputs"]["in"] = c.in;
  if (!c.parts.empty()) m["inputs"]["parts"] = c.parts;
  m["outputs"] = out.files();
  m["seed"] = seed;
  m["seed_requested"] = c.seed_text;
  m["threads"] = c.threads;
  m["config"] = std::move(config);
  out.write("manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
}

SnapshotSeries read_series(const std::string& path) {
  return stage("load", [&] {
    LoadReport report;
    auto s = load_snapshots(path, {}, &report);
    log(1, "loaded " + std::to_string(s.size()) + " snapshots, " + std::to_string(report.edges) + " edges from " + path);
    return s;
  });
}

PartitionSeries read_parts(const std::string& path, const SnapshotSeries& series) {
  return stage("load", [&] { return load_partitions(path, series); });
}

// Louvain on every snapshot; each worker owns whole snapshots and writes to
// its own slot, so the result does not depend on the thread count.
PartitionSeries detect_all(const SnapshotSeries& series, std::uint64_t seed, unsigned threads) {
  PartitionSeries parts(series.size());
  std::vector<std::exception_ptr> errors(series.size());
  auto work = [&](std::size_t first, std::size_t step) {
    for (std::size_t t = first; t < series.size(); t += step) {
      try {
        const Graph& g = series.graph(t);
        if (g.edge_count() == 0) continue;
        auto result = detect(g, seed + t);
        parts[t] = result.levels.back();
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(series.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(work, i, n);
  work(0, n);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return parts;
}

void write_tracking(Outputs& out, const std::vector<DynamicCommunity>& comms, const PartitionSeries& parts,
                    const NodeIndex& nodes) {
  auto events = stage("events", [&] { return reconstruct_all(comms, parts); });
  out.write("dyncomm.tsv", [&](std::ostream& os) { write_dynamic_tsv(os, comms); });
  out.write("dyncomm.json", [&](std::ostream& os) { os << dynamic_communities_json(comms, &nodes) << '\n'; });
  out.write("events.jsonl", [&](std::ostream& os) { write_events_jsonl(os, events); });
  log(1, std::to_string(comms.size()) + " dynamic communities, " + std::to_string(events.size()) + " events");
}

struct BaselineFlags {
  std::string method;
  std::optional<double> k, j, v;
  std::string d = "inf";
};

BaselineConfig baseline_config(const BaselineFlags& f) {
  auto method = parse_baseline_method(f.method);
  if (!method) throw StageError("config", "unknown baseline method '" + f.method + "'");
  auto cfg = BaselineConfig::evaluated(*method);
  if (f.k) cfg.k = *f.k;
  if (*method == BaselineMethod::ged && f.j) cfg.secondary = *f.j;
  if (*method == BaselineMethod::icem && f.v) cfg.secondary = *f.v;
  if (*method == BaselineMethod::greene)
    cfg.dissolve_after = f.d == "inf" ? std::nullopt : std::optional<std::size_t>(std::stoull(f.d));
  stage("config", [&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

json baseline_json(const BaselineConfig& cfg) {
  json j{{"method", std::string(to_string(cfg.method))}, {"k", cfg.k}};
  if (cfg.method == BaselineMethod::ged) j["j"] = cfg.secondary;
  if (cfg.method == BaselineMethod::icem) j["v"] = cfg.secondary;
  if (cfg.method == BaselineMethod::greene)
    j["d"] = cfg.dissolve_after ? json(*cfg.dissolve_after) : json("inf");
  return j;
}

std::vector<std::size_t> counts_from_groups(const std::vector<std::vector<CommunityRef>>& groups, std::size_t snapshots) {
  std::vector<std::size_t> counts(snapshots, 0);
  for (const auto& g : groups) {
    std::set<std::uint32_t> seen;
    for (const auto& r : g)
      if (r.snapshot < snapshots) seen.insert(r.snapshot);
    for (auto s : seen) ++counts[s];
  }
  return counts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic community tracking on snapshot series", "commtrack"};
  app.set_version_flag("--version", COMMTRACK_VERSION);
  app.require_subcommand(1);

  Common c;
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed_text, "integer seed or 'random'")->check(seed_check)->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str(); };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  };
  auto add_metric = [&](CLI::App* sub) {
    sub->add_option("--metric", c.metric, "community similarity")
        ->check(CLI::IsMember({"overlap", "jaccard"}))
        ->capture_default_str();
  };

  auto* detect_cmd = app.add_subcommand("detect", "Louvain partition of every snapshot");
  detect_cmd->add_option("--in", c.in, "snapshot edge list")->required()->check(CLI::ExistingFile);
  add_out(detect_cmd);
  add_seed(detect_cmd);
  add_threads(detect_cmd);

  auto* track_cmd = app.add_subcommand("track", "track communities and reconstruct events");
  track_cmd->add_option("--in", c.in, "snapshot edge list")->required()->check(CLI::ExistingFile);
  track_cmd->add_option("--parts", c.parts, "membership file (detected when omitted)")->check(CLI::ExistingFile);
  add_out(track_cmd);
  add_seed(track_cmd);
  add_threads(track_cmd);
  add_metric(track_cmd);

  BaselineFlags bf;
  auto add_baseline_flags = [&](CLI::App* sub, bool required) {
    auto* m = sub->add_option("--method", bf.method, "greene|takaffoli|ged|tajeuna|icem")
                  ->check(CLI::IsMember({"greene", "takaffoli", "ged", "tajeuna", "icem"}));
    if (required) m->required();
    sub->add_option("--k", bf.k, "matching threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--j", bf.j, "GED second threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--v", bf.v, "ICEM strong-match threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--d", bf.d, "Greene dissolution window")->check(window_check)->capture_default_str();
  };
  auto* baseline_cmd = app.add_subcommand("baseline", "run a threshold-based baseline tracker");
  baseline_cmd->add_option("--in", c.in, "snapshot edge list")->required()->check(CLI::ExistingFile);
  baseline_cmd->add_option("--parts", c.parts, "membership file (detected when omitted)")->check(CLI::ExistingFile);
  add_baseline_flags(baseline_cmd, true);
  add_out(baseline_cmd);
  add_seed(baseline_cmd);
  add_threads(baseline_cmd);

  BenchConfig bc;
  std::string regime = "birthdeath";
  auto add_bench_flags = [&](CLI::App* sub) {
    sub->add_option("--regime", regime)
        ->check(CLI::IsMember({"birthdeath", "expandcontract", "mergesplit", "intermittent"}))
        ->capture_default_str();
    sub->add_option("--nodes", bc.nodes)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--snapshots", bc.snapshots)->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--mu", bc.mixing, "mixing parameter")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--churn", bc.churn)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  };
  auto* bench_cmd = app.add_subcommand("bench", "generate a synthetic benchmark with planted events");
  add_bench_flags(bench_cmd);
  add_out(bench_cmd);
  add_seed(bench_cmd);

  std::string truth_path;
  auto* eval_cmd = app.add_subcommand("eval", "NMI protocol, community counts and stage timings");
  eval_cmd->add_option("--in", c.in, "snapshot edge list")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--parts", c.parts, "ground-truth membership file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", truth_path, "ground-truth dyncomm file for counts")->check(CLI::ExistingFile);
  add_baseline_flags(eval_cmd, false);
  add_out(eval_cmd);
  add_seed(eval_cmd);
  add_threads(eval_cmd);
  add_metric(eval_cmd);

  std::size_t top_k = 10;
  auto* social_cmd = app.add_subcommand("social", "co-hashtag networks and tracked topic communities");
  social_cmd->add_option("--in", c.in, "tweets: user<TAB>timestamp<TAB>tags")->required()->check(CLI::ExistingFile);
  social_cmd->add_option("--parts", c.parts, "external membership file (detected when omitted)")
      ->check(CLI::ExistingFile);
  social_cmd->add_option("--top", top_k, "hashtags listed per community")->capture_default_str();
  add_out(social_cmd);
  add_seed(social_cmd);
  add_threads(social_cmd);
  add_metric(social_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "commtrack: usage: " << e.what() << "\n\n";
    CLI::App* shown = &app;
    for (auto* sub : app.get_subcommands()) shown = sub;
    std::cerr << shown->help();
    return 2;
  }

  try {
    const std::uint64_t seed = c.seed();
    Outputs out(c.out_dir);

    if (*detect_cmd) {
      auto series = read_series(c.in);
      auto parts = stage("detect", [&] { return detect_all(series, seed, c.threads); });
      out.write("membership.tsv", [&](std::ostream& os) { write_partitions(os, parts, series.nodes); });
      write_manifest(out, "detect", c, seed, {{"detector", "louvain"}, {"level", "final"}});
    } else if (*track_cmd) {
      auto series = read_series(c.in);
      auto parts = c.parts.empty() ? stage("detect", [&] { return detect_all(series, seed, c.threads); })
                                   : read_parts(c.parts, series);
      auto net = stage("similarity", [&] { return build_similarity_network(parts, c.similarity_metric(), c.threads); });
      auto comms = stage("track", [&] { return track(net, seed); });
      if (c.parts.empty())
        out.write("membership.tsv", [&](std::ostream& os) { write_partitions(os, parts, series.nodes); });
      write_tracking(out, comms, parts, series.nodes);
      write_manifest(out, "track", c, seed,
                     {{"method", "modularity"},
                      {"metric", c.metric},
                      {"communities", net.size()},
                      {"similarity_edges", net.edges.size()}});
    } else if (*baseline_cmd) {
      auto cfg = baseline_config(bf);
      auto series = read_series(c.in);
      auto parts = c.parts.empty() ? stage("detect", [&] { return detect_all(series, seed, c.threads); })
                                   : read_parts(c.parts, series);
      BaselineTracker tracker(cfg, &series);
      auto comms = stage("baseline", [&] { return tracker.track(parts); });
      if (c.parts.empty())
        out.write("membership.tsv", [&](std::ostream& os) { write_partitions(os, parts, series.nodes); });
      write_tracking(out, comms, parts, series.nodes);
      write_manifest(out, "baseline", c, seed, baseline_json(cfg));
    } else if (*bench_cmd) {
      bc.regime = *parse_regime(regime);
      bc.seed = seed;
      // Smaller instances get the desk-scale size ceiling and event count.
      const std::size_t nodes = bc.nodes;
      bc.nodes = BenchConfig{}.nodes;
      const BenchConfig cfg = desk_scale(bc, nodes);
      auto bench = stage("bench", [&] {
        cfg.validate();
        return generate(cfg);
      });
      out.write("snapshots.tsv", [&](std::ostream& os) { write_snapshots(os, bench.series); });
      out.write("truth_membership.tsv",
                [&](std::ostream& os) { write_partitions(os, bench.truth.partitions, bench.series.nodes); });
      out.write("truth_dyncomm.tsv", [&](std::ostream& os) { write_truth_labels(os, bench.truth); });
      out.write("truth_events.jsonl", [&](std::ostream& os) { write_events_jsonl(os, bench.truth.events); });
      write_manifest(out, "bench", c, seed,
                     {{"regime", regime},
                      {"nodes", cfg.nodes},
                      {"snapshots", cfg.snapshots},
                      {"avg_degree", cfg.avg_degree},
                      {"max_degree", cfg.max_degree},
                      {"mu", cfg.mixing},
                      {"churn", cfg.churn},
                      {"event_count", cfg.event_count},
                      {"min_community", cfg.min_community},
                      {"max_community", cfg.max_community},
                      {"truth_labels", bench.truth.label_count()}});
    } else if (*eval_cmd) {
      auto series = read_series(c.in);
      auto truth = read_parts(c.parts, series);
      if (truth.empty() || truth[0].empty()) throw StageError("eval", "ground truth has no communities at snapshot 1");
      std::optional<std::vector<std::size_t>> counts;
      if (!truth_path.empty()) {
        counts = stage("load", [&] {
          std::ifstream in(truth_path);
          if (!in) throw Error("cannot open " + truth_path);
          return counts_from_groups(read_dynamic_tsv(in), series.size());
        });
      }
      std::unique_ptr<DynamicTracker> tracker;
      json config{{"metric", c.metric}};
      if (bf.method.empty()) {
        tracker = std::make_unique<ModularityTracker>(seed, c.similarity_metric(), c.threads);
        config["method"] = "modularity";
      } else {
        auto cfg = baseline_config(bf);
        tracker = std::make_unique<BaselineTracker>(cfg, &series);
        config = baseline_json(cfg);
      }
      auto detected = stage("detect", [&] { return detect_series(series, seed, truth[0].size()); });
      auto report = stage("eval", [&] {
        return run_protocol(series, truth, *tracker, seed, counts ? &*counts : nullptr, &detected);
      });
      report.timings = stage("timing", [&] { return time_stages(detected, seed, c.similarity_metric(), c.threads, 3); });
      out.write("nmi.csv", [&](std::ostream& os) { write_nmi_csv(os, report); });
      out.write("counts.csv", [&](std::ostream& os) { write_counts_csv(os, report); });
      out.write("timings.csv", [&](std::ostream& os) { write_timings_csv(os, *report.timings); });
      out.write("report.json", [&](std::ostream& os) { os << report_json(report) << '\n'; });
      config["detector_target"] = truth[0].size();
      write_manifest(out, "eval", c, seed, config);
    } else if (*social_cmd) {
      auto tweets = stage("load", [&] {
        std::ifstream in(c.in);
        if (!in) throw Error("cannot open " + c.in);
        return read_tweets(in);
      });
      auto data = stage("cohashtag", [&] { return build_cohashtag_series(tweets); });
      auto parts = c.parts.empty() ? stage("detect", [&] { return detect_all(data.series, seed, c.threads); })
                                   : read_parts(c.parts, data.series);
      auto net = stage("similarity", [&] { return build_similarity_network(parts, c.similarity_metric(), c.threads); });
      auto comms = stage("track", [&] { return track(net, seed); });
      auto profiles = stage("profiles", [&] { return hashtag_profiles(data, parts, top_k); });
      auto rows = stage("summary", [&] { return community_summary(comms, profiles); });
      out.write("cohashtag.tsv", [&](std::ostream& os) { write_snapshots(os, data.series); });
      out.write("membership.tsv", [&](std::ostream& os) { write_partitions(os, parts, data.series.nodes); });
      out.write("dyncomm.tsv", [&](std::ostream& os) { write_dynamic_tsv(os, comms); });
      out.write("summary.csv", [&](std::ostream& os) { write_summary_csv(os, rows); });
      out.write("top_hashtags.csv", [&](std::ostream& os) { write_top_hashtags_csv(os, data, profiles); });
      json days = json::array();
      for (auto d : data.days) days.push_back(format_day(d));
      write_manifest(out, "social", c, seed,
                     {{"method", "modularity"},
                      {"metric", c.metric},
                      {"records", tweets.size()},
                      {"days", days},
                      {"top", top_k},
                      {"dynamic_communities", comms.size()}});
    }
  } catch (const StageError& e) {
    std::cerr << "commtrack: " << e.stage << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "commtrack: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
