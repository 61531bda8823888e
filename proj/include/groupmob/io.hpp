#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupmob/contacts.hpp"
#include "groupmob/cpm.hpp"
#include "groupmob/epidemic.hpp"
#include "groupmob/graph.hpp"
#include "groupmob/metrics.hpp"
#include "groupmob/profile.hpp"
#include "groupmob/recast.hpp"
#include "groupmob/synth.hpp"
#include "groupmob/track.hpp"

namespace groupmob {

// Canonical artifact names inside a run directory. Every stage reads its
// inputs and writes its outputs through these, so stages can be re-run
// independently.
namespace files {
inline constexpr const char* kContacts = "contacts.csv";
inline constexpr const char* kTraceMeta = "trace_meta.txt";
inline constexpr const char* kWindowGraphs = "window_graphs.csv";
inline constexpr const char* kReencounter = "reencounter.csv";
inline constexpr const char* kContactsPerHour = "contacts_per_hour.csv";
inline constexpr const char* kRecommendedParams = "recommended_params.txt";
inline constexpr const char* kRecastEdges = "recast_edges.csv";
inline constexpr const char* kRecastMeta = "recast_meta.txt";
inline constexpr const char* kSocialContacts = "social_contacts.csv";
inline constexpr const char* kGroups = "groups.jsonl";
inline constexpr const char* kTimelines = "timelines.jsonl";
inline constexpr const char* kHistories = "histories.jsonl";
inline constexpr const char* kEvolution = "evolution_by_hour.csv";
inline constexpr const char* kSizesByHour = "sizes_by_hour.csv";
inline constexpr const char* kRemeeting = "remeeting_histogram.csv";
inline constexpr const char* kPeriodicity = "periodicity_scores.csv";
inline constexpr const char* kCorrelations = "duration_correlations.csv";
inline constexpr const char* kCampaigns = "campaign_results.csv";
inline constexpr const char* kMonthlyMeans = "campaign_monthly_means.csv";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kRunConfig = "run_config.txt";
inline constexpr const char* kSynthTrace = "trace.csv";
inline constexpr const char* kGroundTruth = "ground_truth.jsonl";
}  // namespace files

// Shortest round-trip decimal form; keeps emitted files reproducible.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

// ---- contact traces ----

inline void write_contacts_csv(const std::filesystem::path& path, const ContactTrace& trace) {
  auto out = open_output(path);
  const bool durations =
      !trace.records().empty() &&
      std::all_of(trace.records().begin(), trace.records().end(),
                  [](const ContactRecord& r) { return r.duration.has_value(); });
  out << (durations ? "node_a,node_b,timestamp,duration\n" : "node_a,node_b,timestamp\n");
  for (const auto& r : trace.records()) {
    out << r.pair.a << ',' << r.pair.b << ',' << r.timestamp;
    if (durations) out << ',' << *r.duration;
    out << '\n';
  }
}

inline ContactTrace read_contacts_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return ingest_contacts(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

/// `node,unix_timestamp,x_meters,y_meters`, optional header line.
inline std::vector<GeoPoint> read_geo_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<GeoPoint> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = detail::split_csv(line);
    if (lineno == 1 && !detail::numeric_field(fields[0])) continue;
    if (fields.size() != 4)
      throw ParseError(lineno, "expected 4 fields, got " + std::to_string(fields.size()));
    GeoPoint p;
    p.node = detail::parse_nonneg(fields[0], lineno, "node");
    p.timestamp = detail::parse_nonneg(fields[1], lineno, "timestamp");
    p.x = detail::parse_double(fields[2], lineno, "x");
    p.y = detail::parse_double(fields[3], lineno, "y");
    points.push_back(p);
  }
  return points;
}

struct TraceMeta {
  Timestamp origin = 0;
  Timestamp t_min = 0;
  Timestamp t_max = 0;
  std::size_t node_count = 0;
  std::size_t record_count = 0;
};

inline void write_trace_meta(const std::filesystem::path& path, const TraceMeta& meta) {
  auto out = open_output(path);
  out << "origin=" << meta.origin << '\n'
      << "t_min=" << meta.t_min << '\n'
      << "t_max=" << meta.t_max << '\n'
      << "node_count=" << meta.node_count << '\n'
      << "record_count=" << meta.record_count << '\n';
}

inline std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

inline TraceMeta read_trace_meta(const std::filesystem::path& path) {
  auto kv = read_key_values(path);
  TraceMeta meta;
  meta.origin = std::stoll(kv.at("origin"));
  meta.t_min = std::stoll(kv.at("t_min"));
  meta.t_max = std::stoll(kv.at("t_max"));
  meta.node_count = std::stoull(kv.at("node_count"));
  meta.record_count = std::stoull(kv.at("record_count"));
  return meta;
}

// ---- per-window graph dump ----

inline void write_window_graphs_csv(const std::filesystem::path& path, const ContactTrace& trace,
                                    const WindowConfig& cfg,
                                    WeightMode mode = WeightMode::Count) {
  auto out = open_output(path);
  out << "window,node_a,node_b,weight\n";
  const auto [w_lo, w_hi] = window_range(trace, cfg);
  for (std::int64_t w = w_lo; w <= w_hi; ++w) {
    const ContactGraph g = build_window_graph(trace, w, cfg, mode);
    for (const auto& [pair, weight] : g.edges())
      out << w << ',' << pair.a << ',' << pair.b << ',' << fmt_double(weight) << '\n';
  }
}

// ---- profile ----

inline void write_reencounter_csv(const std::filesystem::path& path,
                                  const ReencounterProfile& profile) {
  auto out = open_output(path);
  out << "gap_seconds_bin,probability,cdf\n";
  for (const auto& [bin, p] : profile.mass)
    out << bin << ',' << fmt_double(p) << ',' << fmt_double(profile.cdf.at(bin)) << '\n';
}

inline void write_contacts_per_hour_csv(const std::filesystem::path& path,
                                        const ContactsPerHourPdf& pdf) {
  auto out = open_output(path);
  out << "contacts_per_hour,probability\n";
  for (const auto& [k, p] : pdf.pmf) out << k << ',' << fmt_double(p) << '\n';
}

inline void write_recommendation(const std::filesystem::path& path,
                                 const ParameterRecommendation& rec) {
  auto out = open_output(path);
  out << "tw_seconds=" << rec.tw_seconds << '\n' << "w_th=" << rec.w_th << '\n';
}

// ---- recast ----

inline void write_recast_edges_csv(const std::filesystem::path& path,
                                   const std::vector<EdgeFeatures>& features,
                                   const std::vector<EdgeClassification>& classes) {
  if (features.size() != classes.size())
    throw std::invalid_argument("features/classes size mismatch");
  auto out = open_output(path);
  out << "node_a,node_b,persistence,overlap,class\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << features[i].pair.a << ',' << features[i].pair.b << ','
        << fmt_double(features[i].persistence) << ',' << fmt_double(features[i].overlap) << ','
        << to_string(classes[i].cls) << '\n';
  }
}

inline void write_recast_meta(const std::filesystem::path& path, const RecastConfig& cfg,
                              const Thresholds& th) {
  auto out = open_output(path);
  out << "period_seconds=" << cfg.period_seconds << '\n'
      << "n_samples=" << cfg.n_samples << '\n'
      << "percentile=" << fmt_double(cfg.percentile) << '\n'
      << "seed=" << cfg.seed << '\n'
      << "t_per=" << fmt_double(th.t_per) << '\n'
      << "t_to=" << fmt_double(th.t_to) << '\n';
}

// ---- groups / timelines / histories ----

inline void write_groups_jsonl(const std::filesystem::path& path, const PerWindowGroups& groups) {
  auto out = open_output(path);
  for (const auto& [w, gs] : groups) {
    for (const Group& g : gs) {
      nlohmann::json j;
      j["window"] = g.window;
      j["group_id"] = g.id();
      j["members"] = g.members;
      out << j.dump() << '\n';
    }
  }
}

/// Rebuilds the per-window map; interior windows without groups become empty
/// entries spanning [min, max] of the windows seen.
inline PerWindowGroups read_groups_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  PerWindowGroups groups;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Group g;
    g.window = j.at("window").get<std::int64_t>();
    g.members = j.at("members").get<std::vector<NodeId>>();
    g.ordinal = static_cast<int>(groups[g.window].size());
    groups[g.window].push_back(std::move(g));
  }
  if (!groups.empty()) {
    const std::int64_t lo = groups.begin()->first;
    const std::int64_t hi = groups.rbegin()->first;
    for (std::int64_t w = lo; w <= hi; ++w) groups.try_emplace(w);
  }
  return groups;
}

inline void write_timelines_jsonl(const std::filesystem::path& path,
                                  const std::vector<GroupTimeline>& timelines) {
  auto out = open_output(path);
  for (const auto& t : timelines) {
    nlohmann::json j;
    j["timeline_id"] = t.timeline_id;
    j["first_window"] = t.first_window;
    j["last_window"] = t.last_window();
    j["member_sets"] = t.member_sets;
    j["rho_steps"] = t.rho_steps;
    out << j.dump() << '\n';
  }
}

inline std::vector<GroupTimeline> read_timelines_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<GroupTimeline> timelines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    GroupTimeline t;
    t.timeline_id = j.at("timeline_id").get<int>();
    t.first_window = j.at("first_window").get<std::int64_t>();
    t.member_sets = j.at("member_sets").get<std::vector<std::vector<NodeId>>>();
    t.rho_steps = j.at("rho_steps").get<std::vector<double>>();
    timelines.push_back(std::move(t));
  }
  return timelines;
}

inline void write_histories_jsonl(const std::filesystem::path& path,
                                  const std::vector<GroupHistory>& histories) {
  auto out = open_output(path);
  for (const auto& h : histories) {
    nlohmann::json j;
    j["history_id"] = h.history_id;
    j["timeline_ids"] = h.timeline_ids;
    j["gaps_hours"] = h.gaps_end_to_start;
    out << j.dump() << '\n';
  }
}

/// Start-to-start gaps are rebuilt from the timelines on read.
inline std::vector<GroupHistory> read_histories_jsonl(
    const std::filesystem::path& path, const std::vector<GroupTimeline>& timelines) {
  std::map<int, const GroupTimeline*> by_id;
  for (const auto& t : timelines) by_id[t.timeline_id] = &t;
  auto in = open_input(path);
  std::vector<GroupHistory> histories;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    GroupHistory h;
    h.history_id = j.at("history_id").get<int>();
    h.timeline_ids = j.at("timeline_ids").get<std::vector<int>>();
    h.gaps_end_to_start = j.at("gaps_hours").get<std::vector<std::int64_t>>();
    for (std::size_t i = 1; i < h.timeline_ids.size(); ++i) {
      const auto* prev = by_id.at(h.timeline_ids[i - 1]);
      const auto* cur = by_id.at(h.timeline_ids[i]);
      h.gaps_start_to_start.push_back(cur->first_window - prev->first_window);
    }
    histories.push_back(std::move(h));
  }
  return histories;
}

// ---- evolution / metrics ----

inline void write_evolution_csv(const std::filesystem::path& path, const EvolutionTally& tally) {
  auto out = open_output(path);
  out << "hour,unchanged,growth,contraction,birth,death\n";
  const auto hours = tally.by_hour();
  for (int h = 0; h < 24; ++h) {
    const auto& c = hours[static_cast<std::size_t>(h)];
    out << h << ',' << c.unchanged << ',' << c.growth << ',' << c.contraction << ',' << c.birth
        << ',' << c.death << '\n';
  }
}

inline void write_sizes_by_hour_csv(const std::filesystem::path& path,
                                    const std::array<HourSizeStats, 24>& stats) {
  auto out = open_output(path);
  out << "hour,min,q1,median,q3,max,mean\n";
  for (const auto& s : stats) {
    out << s.hour << ',';
    if (s.count == 0) {
      out << ",,,,,\n";  // empty marker: no groups at this hour
    } else {
      out << fmt_double(s.min) << ',' << fmt_double(s.q1) << ',' << fmt_double(s.median) << ','
          << fmt_double(s.q3) << ',' << fmt_double(s.max) << ',' << fmt_double(s.mean) << '\n';
    }
  }
}

inline void write_remeeting_csv(const std::filesystem::path& path,
                                const PeriodicityHistogram* hist) {
  auto out = open_output(path);
  out << "gap_hours,probability\n";
  if (hist)
    for (const auto& [gap, p] : hist->mass) out << gap << ',' << fmt_double(p) << '\n';
}

inline void write_periodicity_csv(const std::filesystem::path& path,
                                  const PeriodicityHistogram* hist) {
  auto out = open_output(path);
  out << "period_hours,tolerance_hours,score,uniform_baseline\n";
  if (!hist) return;
  const struct {
    std::int64_t period, tol;
  } probes[] = {{24, 1}, {168, 2}};
  for (const auto& pr : probes) {
    out << pr.period << ',' << pr.tol << ','
        << fmt_double(periodicity_score(*hist, pr.period, pr.tol)) << ','
        << fmt_double(periodicity_uniform_baseline(pr.period, pr.tol, hist->horizon_hours))
        << '\n';
  }
}

inline void write_correlations_csv(const std::filesystem::path& path,
                                   const CorrelationReport* rep) {
  auto out = open_output(path);
  out << "metric,r,p_value,n\n";
  if (rep) {
    out << "duration_gscf," << fmt_double(rep->r_duration_gscf) << ','
        << fmt_double(rep->p_duration_gscf) << ',' << rep->n << '\n';
    out << "duration_rho," << fmt_double(rep->r_duration_rho) << ','
        << fmt_double(rep->p_duration_rho) << ',' << rep->n << '\n';
  } else {
    out << "duration_gscf,,,0\n";
    out << "duration_rho,,,0\n";
  }
}

// ---- campaigns ----

inline void write_campaigns_csv(const std::filesystem::path& path,
                                const std::vector<MonthCampaigns>& months) {
  auto out = open_output(path);
  out << "month,origin,class,population,delivered,ratio\n";
  for (const auto& mc : months) {
    for (const auto& res : mc.results) {
      auto emit = [&](const char* cls, const std::vector<NodeId>& members, double ratio) {
        std::size_t hit = 0;
        for (NodeId n : members) hit += res.delivered.count(n);
        out << mc.label << ',' << res.origin << ',' << cls << ',' << members.size() << ','
            << hit << ',' << fmt_double(ratio) << '\n';
      };
      emit("in_group", res.in_group, res.ratio_in);
      emit("out_group", res.out_group, res.ratio_out);
    }
  }
}

inline void write_monthly_means_csv(const std::filesystem::path& path,
                                    const std::vector<MonthCampaigns>& months) {
  auto out = open_output(path);
  out << "month,mean_ratio_in,mean_ratio_out\n";
  for (const auto& mc : months)
    out << mc.label << ',' << fmt_double(mc.mean_ratio_in) << ','
        << fmt_double(mc.mean_ratio_out) << '\n';
}

// ---- synthetic ground truth ----

inline void write_ground_truth_jsonl(const std::filesystem::path& path, const SynthSpec& spec,
                                     const SynthResult& result) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < spec.groups.size(); ++i) {
    const auto& g = spec.groups[i];
    nlohmann::json j;
    j["type"] = "schedule";
    j["group"] = i;
    j["hour"] = g.hour;
    j["weekly_only"] = g.weekly_only;
    j["churn"] = g.churn;
    j["base_members"] = g.members;
    out << j.dump() << '\n';
  }
  for (const auto& m : result.meetings) {
    nlohmann::json j;
    j["type"] = "meeting";
    j["group"] = m.group;
    j["day"] = m.day;
    j["window"] = m.window;
    j["members"] = m.members;
    out << j.dump() << '\n';
  }
}

}  // namespace groupmob
