#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupmob/io.hpp"

namespace groupmob {

inline constexpr const char* kVersion = "0.1.0";

// The seven pipeline stages, in execution order.
inline const std::vector<std::string>& all_stages() {
  static const std::vector<std::string> kStages{"ingest",  "profile", "recast", "detect",
                                                "track",   "metrics", "simulate"};
  return kStages;
}

struct PipelineConfig {
  std::string input;      // contacts CSV
  std::string geo_input;  // alternative: geo CSV converted at ingest
  double geo_d_min = 10.0;
  std::int64_t geo_t_quantum = 300;
  std::string out_dir;

  std::int64_t tw_seconds = 3600;
  std::optional<Timestamp> origin;  // unset: midnight UTC of the first record's day
  int w_th = 2;
  int k = 3;
  double rho_threshold = 0.5;
  std::uint64_t seed = 1;

  std::int64_t profile_bin_seconds = 10;
  double profile_coverage = 0.95;
  std::int64_t profile_base_granularity = 3600;

  RecastConfig recast;  // seed field is overridden by the master seed

  std::int64_t metrics_horizon_hours = 336;
  int metrics_permutations = 10000;

  std::int64_t sim_ttl_seconds = 7 * 86400;
  std::int64_t sim_lookback_seconds = 30 * 86400;
  std::vector<std::string> sim_months;  // "YYYY-MM"; empty: every month in the trace span

  bool dump_window_graphs = false;
  std::set<std::string> stages{all_stages().begin(), all_stages().end()};
};

namespace detail {

inline std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline void save_config(const std::filesystem::path& path, const PipelineConfig& cfg) {
  auto out = open_output(path);
  out << "input=" << cfg.input << '\n'
      << "geo_input=" << cfg.geo_input << '\n'
      << "geo.d_min=" << fmt_double(cfg.geo_d_min) << '\n'
      << "geo.t_quantum=" << cfg.geo_t_quantum << '\n'
      << "out_dir=" << cfg.out_dir << '\n'
      << "tw_seconds=" << cfg.tw_seconds << '\n'
      << "origin=" << (cfg.origin ? std::to_string(*cfg.origin) : std::string("auto")) << '\n'
      << "w_th=" << cfg.w_th << '\n'
      << "k=" << cfg.k << '\n'
      << "rho_threshold=" << fmt_double(cfg.rho_threshold) << '\n'
      << "seed=" << cfg.seed << '\n'
      << "profile.bin_seconds=" << cfg.profile_bin_seconds << '\n'
      << "profile.coverage=" << fmt_double(cfg.profile_coverage) << '\n'
      << "profile.base_granularity=" << cfg.profile_base_granularity << '\n'
      << "recast.period_seconds=" << cfg.recast.period_seconds << '\n'
      << "recast.n_samples=" << cfg.recast.n_samples << '\n'
      << "recast.percentile=" << fmt_double(cfg.recast.percentile) << '\n'
      << "metrics.horizon_hours=" << cfg.metrics_horizon_hours << '\n'
      << "metrics.permutations=" << cfg.metrics_permutations << '\n'
      << "sim.ttl_seconds=" << cfg.sim_ttl_seconds << '\n'
      << "sim.lookback_seconds=" << cfg.sim_lookback_seconds << '\n'
      << "sim.months=" << detail::join(cfg.sim_months, ',') << '\n'
      << "dump_window_graphs=" << (cfg.dump_window_graphs ? "true" : "false") << '\n'
      << "stages=" << detail::join({cfg.stages.begin(), cfg.stages.end()}, ',') << '\n';
}

/// Flat key=value config; `#` starts a comment. Unknown keys are rejected.
inline PipelineConfig load_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  PipelineConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    };
    trim(key);
    trim(value);
    try {
      if (key == "input") cfg.input = value;
      else if (key == "geo_input") cfg.geo_input = value;
      else if (key == "geo.d_min") cfg.geo_d_min = std::stod(value);
      else if (key == "geo.t_quantum") cfg.geo_t_quantum = std::stoll(value);
      else if (key == "out_dir") cfg.out_dir = value;
      else if (key == "tw_seconds") cfg.tw_seconds = std::stoll(value);
      else if (key == "origin") {
        if (value == "auto") cfg.origin.reset();
        else cfg.origin = std::stoll(value);
      }
      else if (key == "w_th") cfg.w_th = std::stoi(value);
      else if (key == "k") cfg.k = std::stoi(value);
      else if (key == "rho_threshold") cfg.rho_threshold = std::stod(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "profile.bin_seconds") cfg.profile_bin_seconds = std::stoll(value);
      else if (key == "profile.coverage") cfg.profile_coverage = std::stod(value);
      else if (key == "profile.base_granularity") cfg.profile_base_granularity = std::stoll(value);
      else if (key == "recast.period_seconds") cfg.recast.period_seconds = std::stoll(value);
      else if (key == "recast.n_samples") cfg.recast.n_samples = std::stoi(value);
      else if (key == "recast.percentile") cfg.recast.percentile = std::stod(value);
      else if (key == "metrics.horizon_hours") cfg.metrics_horizon_hours = std::stoll(value);
      else if (key == "metrics.permutations") cfg.metrics_permutations = std::stoi(value);
      else if (key == "sim.ttl_seconds") cfg.sim_ttl_seconds = std::stoll(value);
      else if (key == "sim.lookback_seconds") cfg.sim_lookback_seconds = std::stoll(value);
      else if (key == "sim.months") cfg.sim_months = detail::split_list(value);
      else if (key == "dump_window_graphs") cfg.dump_window_graphs = (value == "true" || value == "1");
      else if (key == "stages") {
        auto list = detail::split_list(value);
        cfg.stages = {list.begin(), list.end()};
      }
      else throw ParseError(lineno, "unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError(lineno, "bad value for '" + key + "': '" + value + "'");
    }
  }
  for (const auto& s : cfg.stages) {
    if (std::find(all_stages().begin(), all_stages().end(), s) == all_stages().end())
      throw std::runtime_error("unknown stage '" + s + "'");
  }
  return cfg;
}

class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& msg)
      : std::runtime_error("stage " + stage + ": " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct StageReport {
  std::string name;
  double seconds = 0;
  std::vector<std::string> outputs;  // file names relative to the run directory
};

struct RunReport {
  std::vector<StageReport> stages;
  ContactTrace trace;
  WindowConfig window_config;
  SocialTrace social;
  PerWindowGroups groups;
  std::vector<GroupTimeline> timelines;
  std::vector<GroupHistory> histories;
  EvolutionTally evolution;
  std::vector<GroupMetricsRecord> meeting_records;
  std::optional<PeriodicityHistogram> remeeting;
  std::optional<CorrelationReport> correlations;
  std::vector<MonthCampaigns> campaigns;
  std::string manifest_path;
};

namespace detail {

inline std::string file_digest(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  char hex[19];
  std::snprintf(hex, sizeof hex, "0x%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace detail

/// Runs the requested stages in order, persisting every stage's artifacts under
/// cfg.out_dir and finishing with a manifest that lists config, stage timings
/// and a digest per output file. A stage failure aborts the run (outputs of
/// completed stages stay on disk); skipped stages neither run nor write.
inline RunReport run_pipeline(const PipelineConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.out_dir.empty()) throw std::invalid_argument("out_dir not set");
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  save_config(dir / files::kRunConfig, cfg);

  auto enabled = [&](const std::string& s) { return cfg.stages.count(s) != 0; };
  auto require = [&](const std::string& stage, const std::string& needed) {
    if (!enabled(needed))
      throw PipelineError(stage, "requires stage '" + needed + "' to be enabled");
  };
  if (!enabled("ingest")) throw PipelineError("ingest", "ingest cannot be skipped");
  if (enabled("track")) require("track", "detect");
  if (enabled("metrics")) require("metrics", "track");
  if (enabled("simulate")) require("simulate", "detect");

  RunReport report;
  using clock = std::chrono::steady_clock;
  auto run_stage = [&](const std::string& name, auto&& fn) {
    const auto start = clock::now();
    StageReport sr;
    sr.name = name;
    try {
      fn(sr);
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError(name, e.what());
    }
    sr.seconds = std::chrono::duration<double>(clock::now() - start).count();
    report.stages.push_back(std::move(sr));
  };

  run_stage("ingest", [&](StageReport& sr) {
    if (!cfg.geo_input.empty()) {
      report.trace = proximity_from_geo(read_geo_csv(cfg.geo_input), cfg.geo_d_min,
                                        cfg.geo_t_quantum);
    } else if (!cfg.input.empty()) {
      report.trace = read_contacts_csv(cfg.input);
    } else {
      throw std::runtime_error("no input configured");
    }
    report.window_config = WindowConfig::for_trace(report.trace, cfg.tw_seconds);
    if (cfg.origin) report.window_config.origin = *cfg.origin;
    write_contacts_csv(dir / files::kContacts, report.trace);
    sr.outputs.push_back(files::kContacts);
    TraceMeta meta{report.window_config.origin, report.trace.t_min(), report.trace.t_max(),
                   report.trace.node_count(), report.trace.records().size()};
    write_trace_meta(dir / files::kTraceMeta, meta);
    sr.outputs.push_back(files::kTraceMeta);
    if (cfg.dump_window_graphs) {
      write_window_graphs_csv(dir / files::kWindowGraphs, report.trace, report.window_config);
      sr.outputs.push_back(files::kWindowGraphs);
    }
  });

  if (enabled("profile")) {
    run_stage("profile", [&](StageReport& sr) {
      const auto re = reencounter_distribution(report.trace, cfg.profile_bin_seconds);
      const auto pdf = contacts_per_hour_pdf(report.trace, report.window_config);
      const auto rec = recommend_parameters(re, pdf, cfg.profile_coverage,
                                            cfg.profile_base_granularity);
      write_reencounter_csv(dir / files::kReencounter, re);
      write_contacts_per_hour_csv(dir / files::kContactsPerHour, pdf);
      write_recommendation(dir / files::kRecommendedParams, rec);
      sr.outputs = {files::kReencounter, files::kContactsPerHour, files::kRecommendedParams};
    });
  }

  report.social = SocialTrace{report.trace};
  if (enabled("recast")) {
    run_stage("recast", [&](StageReport& sr) {
      RecastConfig rc = cfg.recast;
      rc.seed = cfg.seed;
      const RecastResult res = recast_filter(report.trace, rc);
      report.social = res.social;
      write_recast_edges_csv(dir / files::kRecastEdges, res.features, res.classes);
      write_recast_meta(dir / files::kRecastMeta, rc, res.thresholds);
      write_contacts_csv(dir / files::kSocialContacts, report.social.trace);
      sr.outputs = {files::kRecastEdges, files::kRecastMeta, files::kSocialContacts};
    });
  }

  if (enabled("detect")) {
    run_stage("detect", [&](StageReport& sr) {
      report.groups = detect_groups(report.social, report.window_config, cfg.w_th, cfg.k);
      write_groups_jsonl(dir / files::kGroups, report.groups);
      sr.outputs = {files::kGroups};
    });
  }

  if (enabled("track")) {
    run_stage("track", [&](StageReport& sr) {
      const auto matches = match_all_transitions(report.groups, cfg.rho_threshold);
      report.timelines = build_timelines(report.groups, cfg.rho_threshold);
      report.evolution = classify_evolution(report.groups, matches, report.window_config);
      report.histories = link_remeetings(report.timelines, cfg.rho_threshold);
      write_timelines_jsonl(dir / files::kTimelines, report.timelines);
      write_histories_jsonl(dir / files::kHistories, report.histories);
      write_evolution_csv(dir / files::kEvolution, report.evolution);
      sr.outputs = {files::kTimelines, files::kHistories, files::kEvolution};
    });
  }

  if (enabled("metrics")) {
    run_stage("metrics", [&](StageReport& sr) {
      report.meeting_records = meeting_metrics(report.timelines, report.social.trace,
                                               report.window_config, cfg.w_th);
      const auto sizes = sizes_by_hour(report.groups, report.window_config);
      write_sizes_by_hour_csv(dir / files::kSizesByHour, sizes);
      // degenerate inputs (no re-meetings / too few long meetings) leave the
      // histogram and correlations empty rather than failing the run
      try {
        report.remeeting = remeeting_histogram(report.histories, cfg.metrics_horizon_hours,
                                               report.window_config.tw_seconds);
      } catch (const std::runtime_error&) {
        report.remeeting.reset();
      }
      try {
        report.correlations = duration_correlations(report.meeting_records,
                                                    cfg.metrics_permutations, cfg.seed);
      } catch (const std::runtime_error&) {
        report.correlations.reset();
      }
      write_remeeting_csv(dir / files::kRemeeting,
                          report.remeeting ? &*report.remeeting : nullptr);
      write_periodicity_csv(dir / files::kPeriodicity,
                            report.remeeting ? &*report.remeeting : nullptr);
      write_correlations_csv(dir / files::kCorrelations,
                             report.correlations ? &*report.correlations : nullptr);
      sr.outputs = {files::kSizesByHour, files::kRemeeting, files::kPeriodicity,
                    files::kCorrelations};
    });
  }

  if (enabled("simulate")) {
    run_stage("simulate", [&](StageReport& sr) {
      std::vector<Timestamp> starts;
      if (cfg.sim_months.empty()) {
        starts = months_spanning(report.trace);
      } else {
        for (const auto& m : cfg.sim_months) starts.push_back(parse_month_utc(m));
      }
      report.campaigns = monthly_campaigns(report.trace, report.groups, report.window_config,
                                           starts, cfg.sim_ttl_seconds,
                                           cfg.sim_lookback_seconds);
      write_campaigns_csv(dir / files::kCampaigns, report.campaigns);
      write_monthly_means_csv(dir / files::kMonthlyMeans, report.campaigns);
      sr.outputs = {files::kCampaigns, files::kMonthlyMeans};
    });
  }

  nlohmann::json manifest;
  manifest["artifact"] = "groupmob";
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.seed;
  manifest["config_file"] = files::kRunConfig;
  nlohmann::json stages = nlohmann::json::array();
  nlohmann::json outputs = nlohmann::json::array();
  {
    nlohmann::json cfg_entry;
    cfg_entry["path"] = files::kRunConfig;
    cfg_entry["digest_fnv1a64"] = detail::file_digest(dir / files::kRunConfig);
    outputs.push_back(cfg_entry);
  }
  for (const auto& sr : report.stages) {
    nlohmann::json s;
    s["name"] = sr.name;
    s["seconds"] = sr.seconds;
    s["outputs"] = sr.outputs;
    stages.push_back(s);
    for (const auto& f : sr.outputs) {
      nlohmann::json o;
      o["path"] = f;
      o["digest_fnv1a64"] = detail::file_digest(dir / f);
      outputs.push_back(o);
    }
  }
  manifest["stages"] = stages;
  manifest["outputs"] = outputs;
  {
    auto out = open_output(dir / files::kManifest);
    out << manifest.dump(2) << '\n';
  }
  report.manifest_path = (dir / files::kManifest).string();
  return report;
}

}  // namespace groupmob
