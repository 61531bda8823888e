// groupmob: detect, track and characterize social groups in proximity traces.
//
// Subcommands mirror the pipeline stages and exchange flat CSV/JSON-lines
// artifacts through a working directory, so any stage can be re-run alone.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "groupmob/io.hpp"
#include "groupmob/pipeline.hpp"

namespace fs = std::filesystem;
using namespace groupmob;

namespace {

WindowConfig window_config_for(const fs::path& dir, std::int64_t tw) {
  const TraceMeta meta = read_trace_meta(dir / files::kTraceMeta);
  WindowConfig cfg;
  cfg.tw_seconds = tw;
  cfg.origin = meta.origin;
  return cfg;
}

ContactTrace load_social_or_raw(const fs::path& dir) {
  const fs::path social = dir / files::kSocialContacts;
  if (fs::exists(social)) return read_contacts_csv(social);
  return read_contacts_csv(dir / files::kContacts);
}

// "1,2,3@9" members meeting daily at hour 9; trailing 'w' marks weekly-only,
// '~0.1' sets the per-meeting churn: "4,5,6@14w~0.1".
PlantedGroup parse_planted_group(const std::string& s) {
  const auto at = s.find('@');
  if (at == std::string::npos) throw std::runtime_error("group spec needs '@hour': " + s);
  PlantedGroup g;
  for (const auto& m : groupmob::detail::split_list(s.substr(0, at)))
    g.members.push_back(std::stoll(m));
  std::string rest = s.substr(at + 1);
  const auto tilde = rest.find('~');
  if (tilde != std::string::npos) {
    g.churn = std::stod(rest.substr(tilde + 1));
    rest.erase(tilde);
  }
  if (!rest.empty() && rest.back() == 'w') {
    g.weekly_only = true;
    rest.pop_back();
  }
  g.hour = std::stoi(rest);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group mobility analysis over proximity contact traces"};
  app.require_subcommand(1);

  std::string dir = ".";
  app.add_option("-d,--dir", dir, "working directory for stage artifacts")
      ->capture_default_str();

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic trace with planted groups");
  SynthSpec spec;
  std::vector<std::string> group_specs;
  synth->add_option("--nodes", spec.node_count, "node count")->capture_default_str();
  synth->add_option("--days", spec.day_count, "trace length in days")->capture_default_str();
  synth->add_option("--group", group_specs,
                    "planted group, e.g. 1,2,3@9 (daily 9h) or 4,5,6@14w~0.1 (weekly, churn)");
  synth->add_option("--noise", spec.noise_contacts_per_hour, "random contacts per hour")
      ->capture_default_str();
  synth->add_option("--tick", spec.tick_seconds, "sampling tick seconds")->capture_default_str();
  synth->add_option("--seed", spec.seed, "rng seed")->capture_default_str();

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "canonicalize a raw contacts or geo CSV");
  std::string input, geo_input;
  double geo_d_min = 10.0;
  std::int64_t geo_t_quantum = 300;
  bool dump_graphs = false;
  std::int64_t tw = 3600;
  ingest->add_option("--input", input, "contacts CSV (node_a,node_b,timestamp[,duration])");
  ingest->add_option("--geo-input", geo_input, "geo CSV (node,timestamp,x_meters,y_meters)");
  ingest->add_option("--d-min", geo_d_min, "geo contact distance, meters")->capture_default_str();
  ingest->add_option("--t-quantum", geo_t_quantum, "geo time bucket, seconds")
      ->capture_default_str();
  ingest->add_flag("--dump-graphs", dump_graphs, "also dump per-window graphs");
  ingest->add_option("--tw", tw, "window length in seconds")->capture_default_str();

  // ---- profile ----
  auto* profile = app.add_subcommand("profile", "re-encounter and contacts-per-hour profiles");
  std::int64_t bin_seconds = 10;
  double coverage = 0.95;
  std::int64_t base_granularity = 3600;
  profile->add_option("--bin-seconds", bin_seconds, "re-encounter histogram bin")
      ->capture_default_str();
  profile->add_option("--coverage", coverage, "re-encounter CDF coverage for tw")
      ->capture_default_str();
  profile->add_option("--base", base_granularity, "tw granularity in seconds")
      ->capture_default_str();

  // ---- recast ----
  auto* recast = app.add_subcommand("recast", "classify social vs random pairs, strip random");
  RecastConfig rc;
  recast->add_option("--period", rc.period_seconds, "persistence period seconds")
      ->capture_default_str();
  recast->add_option("--samples", rc.n_samples, "null model sample count")->capture_default_str();
  recast->add_option("--percentile", rc.percentile, "null model threshold percentile")
      ->capture_default_str();
  recast->add_option("--seed", rc.seed, "rng seed")->capture_default_str();

  // ---- detect ----
  auto* detect = app.add_subcommand("detect", "per-window group detection (clique percolation)");
  int w_th = 2;
  int k = 3;
  detect->add_option("--tw", tw, "window length in seconds")->capture_default_str();
  detect->add_option("--w-th", w_th, "minimum edge weight")->capture_default_str();
  detect->add_option("--k", k, "clique size")->capture_default_str();

  // ---- track ----
  auto* track = app.add_subcommand("track", "match groups across windows, build timelines");
  double rho = 0.5;
  track->add_option("--tw", tw, "window length in seconds")->capture_default_str();
  track->add_option("--rho", rho, "matching threshold")->capture_default_str();

  // ---- metrics ----
  auto* metrics = app.add_subcommand("metrics", "sizes, periodicity, GSCF and correlations");
  std::int64_t horizon = 336;
  int permutations = 10000;
  std::uint64_t metrics_seed = 1;
  metrics->add_option("--tw", tw, "window length in seconds")->capture_default_str();
  metrics->add_option("--w-th", w_th, "minimum edge weight")->capture_default_str();
  metrics->add_option("--horizon", horizon, "re-meeting horizon in hours")->capture_default_str();
  metrics->add_option("--permutations", permutations, "permutation test shuffles")
      ->capture_default_str();
  metrics->add_option("--seed", metrics_seed, "rng seed")->capture_default_str();

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "epidemic dissemination case study");
  std::int64_t ttl = 7 * 86400;
  std::int64_t lookback = 30 * 86400;
  std::string months_csv;
  simulate->add_option("--tw", tw, "window length in seconds")->capture_default_str();
  simulate->add_option("--ttl", ttl, "delivery deadline seconds")->capture_default_str();
  simulate->add_option("--lookback", lookback, "group co-membership lookback seconds")
      ->capture_default_str();
  simulate->add_option("--months", months_csv, "comma-separated YYYY-MM list (default: all)");

  // ---- run ----
  auto* run = app.add_subcommand("run", "full pipeline");
  std::string config_path;
  std::string run_input, run_out;
  std::uint64_t run_seed = 0;
  bool have_seed = false;
  run->add_option("--config", config_path, "pipeline config file (key=value)");
  run->add_option("--input", run_input, "contacts CSV (overrides config)");
  run->add_option("--out", run_out, "output directory (overrides config)");
  run->add_option("--seed", run_seed, "rng seed (overrides config)")
      ->each([&](const std::string&) { have_seed = true; });

  CLI11_PARSE(app, argc, argv);

  const fs::path work(dir);
  try {
    if (*synth) {
      fs::create_directories(work);
      for (const auto& gs : group_specs) spec.groups.push_back(parse_planted_group(gs));
      const SynthResult result = synth_trace(spec);
      write_contacts_csv(work / files::kSynthTrace, result.trace);
      write_ground_truth_jsonl(work / files::kGroundTruth, spec, result);
      std::cout << "synth: " << result.trace.records().size() << " contacts, "
                << result.meetings.size() << " planted meetings -> "
                << (work / files::kSynthTrace).string() << "\n";
    } else if (*ingest) {
      fs::create_directories(work);
      ContactTrace trace;
      if (!geo_input.empty())
        trace = proximity_from_geo(read_geo_csv(geo_input), geo_d_min, geo_t_quantum);
      else if (!input.empty())
        trace = read_contacts_csv(input);
      else
        throw std::runtime_error("ingest needs --input or --geo-input");
      const WindowConfig cfg = WindowConfig::for_trace(trace, tw);
      write_contacts_csv(work / files::kContacts, trace);
      write_trace_meta(work / files::kTraceMeta,
                       {cfg.origin, trace.t_min(), trace.t_max(), trace.node_count(),
                        trace.records().size()});
      if (dump_graphs) write_window_graphs_csv(work / files::kWindowGraphs, trace, cfg);
      std::cout << "ingest: " << trace.records().size() << " records, "
                << trace.node_count() << " nodes\n";
    } else if (*profile) {
      const ContactTrace trace = read_contacts_csv(work / files::kContacts);
      const WindowConfig cfg = window_config_for(work, tw);
      const auto re = reencounter_distribution(trace, bin_seconds);
      const auto pdf = contacts_per_hour_pdf(trace, cfg);
      const auto rec = recommend_parameters(re, pdf, coverage, base_granularity);
      write_reencounter_csv(work / files::kReencounter, re);
      write_contacts_per_hour_csv(work / files::kContactsPerHour, pdf);
      write_recommendation(work / files::kRecommendedParams, rec);
      std::cout << "profile: recommended tw=" << rec.tw_seconds << "s w_th=" << rec.w_th
                << "\n";
    } else if (*recast) {
      const ContactTrace trace = read_contacts_csv(work / files::kContacts);
      const RecastResult res = recast_filter(trace, rc);
      write_recast_edges_csv(work / files::kRecastEdges, res.features, res.classes);
      write_recast_meta(work / files::kRecastMeta, rc, res.thresholds);
      write_contacts_csv(work / files::kSocialContacts, res.social.trace);
      std::cout << "recast: t_per=" << res.thresholds.t_per << " t_to=" << res.thresholds.t_to
                << ", kept " << res.social.trace.records().size() << "/"
                << trace.records().size() << " contacts\n";
    } else if (*detect) {
      const SocialTrace social{load_social_or_raw(work)};
      const WindowConfig cfg = window_config_for(work, tw);
      const PerWindowGroups groups = detect_groups(social, cfg, w_th, k);
      write_groups_jsonl(work / files::kGroups, groups);
      std::size_t n = 0;
      for (const auto& [w, gs] : groups) n += gs.size();
      std::cout << "detect: " << n << " group instances over " << groups.size()
                << " windows\n";
    } else if (*track) {
      const PerWindowGroups groups = read_groups_jsonl(work / files::kGroups);
      const WindowConfig cfg = window_config_for(work, tw);
      const auto matches = match_all_transitions(groups, rho);
      const auto timelines = build_timelines(groups, rho);
      const auto evolution = classify_evolution(groups, matches, cfg);
      const auto histories = link_remeetings(timelines, rho);
      write_timelines_jsonl(work / files::kTimelines, timelines);
      write_histories_jsonl(work / files::kHistories, histories);
      write_evolution_csv(work / files::kEvolution, evolution);
      std::cout << "track: " << timelines.size() << " timelines, " << histories.size()
                << " histories\n";
    } else if (*metrics) {
      const ContactTrace social = load_social_or_raw(work);
      const WindowConfig cfg = window_config_for(work, tw);
      const PerWindowGroups groups = read_groups_jsonl(work / files::kGroups);
      const auto timelines = read_timelines_jsonl(work / files::kTimelines);
      const auto histories = read_histories_jsonl(work / files::kHistories, timelines);
      const auto records = meeting_metrics(timelines, social, cfg, w_th);
      write_sizes_by_hour_csv(work / files::kSizesByHour, sizes_by_hour(groups, cfg));
      std::optional<PeriodicityHistogram> hist;
      try {
        hist = remeeting_histogram(histories, horizon, cfg.tw_seconds);
      } catch (const std::runtime_error&) {
      }
      std::optional<CorrelationReport> rep;
      try {
        rep = duration_correlations(records, permutations, metrics_seed);
      } catch (const std::runtime_error&) {
      }
      write_remeeting_csv(work / files::kRemeeting, hist ? &*hist : nullptr);
      write_periodicity_csv(work / files::kPeriodicity, hist ? &*hist : nullptr);
      write_correlations_csv(work / files::kCorrelations, rep ? &*rep : nullptr);
      std::cout << "metrics: " << records.size() << " meetings";
      if (hist) std::cout << ", 24h score " << periodicity_score(*hist, 24, 1);
      std::cout << "\n";
    } else if (*simulate) {
      const ContactTrace trace = read_contacts_csv(work / files::kContacts);
      const WindowConfig cfg = window_config_for(work, tw);
      const PerWindowGroups groups = read_groups_jsonl(work / files::kGroups);
      std::vector<Timestamp> starts;
      if (months_csv.empty())
        starts = months_spanning(trace);
      else
        for (const auto& m : groupmob::detail::split_list(months_csv))
          starts.push_back(parse_month_utc(m));
      const auto campaigns = monthly_campaigns(trace, groups, cfg, starts, ttl, lookback);
      write_campaigns_csv(work / files::kCampaigns, campaigns);
      write_monthly_means_csv(work / files::kMonthlyMeans, campaigns);
      for (const auto& mc : campaigns)
        std::cout << "simulate " << mc.label << ": mean in=" << mc.mean_ratio_in
                  << " out=" << mc.mean_ratio_out << " (" << mc.active_origins
                  << " active origins)\n";
    } else if (*run) {
      PipelineConfig cfg;
      if (!config_path.empty()) cfg = load_config(config_path);
      if (!run_input.empty()) cfg.input = run_input;
      if (!run_out.empty()) cfg.out_dir = run_out;
      if (have_seed) cfg.seed = run_seed;
      if (cfg.out_dir.empty()) cfg.out_dir = (work / "run").string();
      const RunReport report = run_pipeline(cfg);
      for (const auto& sr : report.stages)
        std::printf("stage %-8s %8.3fs  %zu output(s)\n", sr.name.c_str(), sr.seconds,
                    sr.outputs.size());
      std::cout << "manifest: " << report.manifest_path << "\n";
    }
  } catch (const PipelineError& e) {
    std::cerr << "error[" << e.stage() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[" << app.get_subcommands().front()->get_name() << "]: " << e.what()
              << "\n";
    return 1;
  }
  return 0;
}
