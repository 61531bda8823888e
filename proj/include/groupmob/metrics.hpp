#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "groupmob/graph.hpp"
#include "groupmob/rng.hpp"
#include "groupmob/track.hpp"

namespace groupmob {

/// Self-containment of a member set inside one window graph: internal edge
/// weight over total incident edge weight. A group with no incident edges at
/// all counts as fully self-contained (1.0).
inline double gscf(const ContactGraph& g, const std::vector<NodeId>& members) {
  if (members.empty()) throw std::invalid_argument("members empty");
  for (NodeId m : members)
    if (!g.has_vertex(m))
      throw std::invalid_argument("member " + std::to_string(m) + " not in graph");
  auto is_member = [&](NodeId n) {
    return std::binary_search(members.begin(), members.end(), n);
  };
  double w_in = 0.0, w_out = 0.0;
  for (const auto& [pair, w] : g.edges()) {
    const bool a = is_member(pair.a);
    const bool b = is_member(pair.b);
    if (a && b)
      w_in += w;
    else if (a || b)
      w_out += w;
  }
  const double denom = w_in + w_out;
  return denom == 0.0 ? 1.0 : w_in / denom;
}

struct HourSizeStats {
  int hour = 0;
  std::size_t count = 0;  // group instances observed at this hour
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

namespace detail {

// linear-interpolation quantile on a sorted sample
inline double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(lo);
  return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

}  // namespace detail

/// Distribution of group sizes for each wall-clock hour, pooled over all
/// windows at that hour. Hours with no groups keep count == 0.
inline std::array<HourSizeStats, 24> sizes_by_hour(const PerWindowGroups& groups,
                                                   const WindowConfig& cfg) {
  std::array<std::vector<double>, 24> sizes;
  for (const auto& [w, gs] : groups) {
    const auto h = static_cast<std::size_t>(hour_of_day(w, cfg));
    for (const auto& g : gs) sizes[h].push_back(static_cast<double>(g.members.size()));
  }
  std::array<HourSizeStats, 24> out{};
  for (int h = 0; h < 24; ++h) {
    auto& v = sizes[static_cast<std::size_t>(h)];
    auto& s = out[static_cast<std::size_t>(h)];
    s.hour = h;
    s.count = v.size();
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    s.q1 = detail::quantile_sorted(v, 0.25);
    s.median = detail::quantile_sorted(v, 0.5);
    s.q3 = detail::quantile_sorted(v, 0.75);
    s.mean = 0;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
  }
  return out;
}

/// PMF over 1-hour bins of the start-to-start re-meeting gaps pooled from all
/// histories, restricted to gaps within the horizon.
struct PeriodicityHistogram {
  std::int64_t horizon_hours = 336;
  std::map<std::int64_t, double> mass;  // gap hours -> probability
};

inline PeriodicityHistogram remeeting_histogram(const std::vector<GroupHistory>& histories,
                                                std::int64_t horizon_hours = 336,
                                                std::int64_t tw_seconds = 3600) {
  if (horizon_hours < 24) throw std::invalid_argument("horizon_hours must be >= 24");
  if (tw_seconds <= 0) throw std::invalid_argument("tw_seconds must be positive");
  std::map<std::int64_t, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto& h : histories) {
    for (std::int64_t gap_windows : h.gaps_start_to_start) {
      std::int64_t hours = (gap_windows * tw_seconds) / 3600;
      if (hours < 1) hours = 1;
      if (hours > horizon_hours) continue;
      counts[hours] += 1;
      ++total;
    }
  }
  if (total == 0) throw std::runtime_error("no gaps");
  PeriodicityHistogram out;
  out.horizon_hours = horizon_hours;
  for (const auto& [gap, n] : counts)
    out.mass[gap] = static_cast<double>(n) / static_cast<double>(total);
  return out;
}

/// Probability mass within +/- tolerance of any positive multiple of the
/// period.
inline double periodicity_score(const PeriodicityHistogram& h, std::int64_t period_hours,
                                std::int64_t tolerance_hours) {
  if (period_hours < 1) throw std::invalid_argument("period_hours must be >= 1");
  if (tolerance_hours < 0 || 2 * tolerance_hours >= period_hours)
    throw std::invalid_argument("tolerance must be < period/2");
  double score = 0.0;
  for (const auto& [gap, p] : h.mass) {
    std::int64_t m = (gap + period_hours / 2) / period_hours;
    if (m < 1) m = 1;
    if (std::llabs(gap - m * period_hours) <= tolerance_hours) score += p;
  }
  return score;
}

// Fraction of [1, horizon] covered by +/- tolerance bands around the multiples
// of the period; the flat-histogram reference for periodicity_score.
inline double periodicity_uniform_baseline(std::int64_t period_hours,
                                           std::int64_t tolerance_hours,
                                           std::int64_t horizon_hours) {
  std::int64_t covered = 0;
  for (std::int64_t b = 1; b <= horizon_hours; ++b) {
    std::int64_t m = (b + period_hours / 2) / period_hours;
    if (m < 1) m = 1;
    if (std::llabs(b - m * period_hours) <= tolerance_hours) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(horizon_hours);
}

/// Sample Pearson correlation coefficient.
inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("need at least 3 samples");
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::runtime_error("undefined correlation");
  return sxy / std::sqrt(sxx * syy);
}

/// Per-meeting summary used by the duration correlations.
struct GroupMetricsRecord {
  int timeline_id = -1;
  double duration_hours = 0;          // meeting length
  std::optional<double> mean_rho;     // mean step rho; defined for duration >= 2
  double mean_gscf = 0;
};

/// Evaluates every meeting on the same thresholded per-window graphs the
/// detector saw and averages rho and GSCF over the meeting.
inline std::vector<GroupMetricsRecord> meeting_metrics(
    const std::vector<GroupTimeline>& timelines, const ContactTrace& social_trace,
    const WindowConfig& cfg, int w_th) {
  std::map<std::int64_t, ContactGraph> graph_cache;
  auto graph_at = [&](std::int64_t w) -> const ContactGraph& {
    auto it = graph_cache.find(w);
    if (it == graph_cache.end())
      it = graph_cache
               .emplace(w, apply_weight_threshold(
                               build_window_graph(social_trace, w, cfg, WeightMode::Count), w_th))
               .first;
    return it->second;
  };
  std::vector<GroupMetricsRecord> out;
  out.reserve(timelines.size());
  for (const auto& tl : timelines) {
    GroupMetricsRecord rec;
    rec.timeline_id = tl.timeline_id;
    rec.duration_hours = static_cast<double>(tl.length_windows()) *
                         static_cast<double>(cfg.tw_seconds) / 3600.0;
    double sum_gscf = 0;
    for (std::size_t i = 0; i < tl.member_sets.size(); ++i)
      sum_gscf += gscf(graph_at(tl.first_window + static_cast<std::int64_t>(i)),
                       tl.member_sets[i]);
    rec.mean_gscf = sum_gscf / static_cast<double>(tl.member_sets.size());
    if (!tl.rho_steps.empty()) {
      double sum_rho = 0;
      for (double r : tl.rho_steps) sum_rho += r;
      rec.mean_rho = sum_rho / static_cast<double>(tl.rho_steps.size());
    }
    out.push_back(rec);
  }
  return out;
}

struct CorrelationReport {
  double r_duration_gscf = 0;
  double p_duration_gscf = 1;
  double r_duration_rho = 0;
  double p_duration_rho = 1;
  std::size_t n = 0;
};

namespace detail {

inline double permutation_p_value(const std::vector<double>& xs, std::vector<double> ys,
                                  double r_obs, int n_permutations, std::mt19937_64 rng) {
  int hits = 0;
  for (int i = 0; i < n_permutations; ++i) {
    fisher_yates_shuffle(ys, rng);
    if (std::abs(pearson(xs, ys)) >= std::abs(r_obs)) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(n_permutations + 1);
}

}  // namespace detail

/// Pearson r of meeting duration against mean GSCF and against mean rho over
/// the meetings with duration >= 2 (where mean rho exists), with two-sided
/// permutation-test p-values.
inline CorrelationReport duration_correlations(const std::vector<GroupMetricsRecord>& records,
                                               int n_permutations = 10000,
                                               std::uint64_t seed = 1) {
  if (n_permutations < 1) throw std::invalid_argument("n_permutations must be >= 1");
  std::vector<double> dur, gs, rho;
  for (const auto& r : records) {
    if (!r.mean_rho) continue;
    dur.push_back(r.duration_hours);
    gs.push_back(r.mean_gscf);
    rho.push_back(*r.mean_rho);
  }
  if (dur.size() < 3) throw std::runtime_error("fewer than 3 eligible records");
  CorrelationReport rep;
  rep.n = dur.size();
  rep.r_duration_gscf = pearson(dur, gs);
  rep.r_duration_rho = pearson(dur, rho);
  rep.p_duration_gscf = detail::permutation_p_value(dur, gs, rep.r_duration_gscf,
                                                    n_permutations, substream(seed, "perm-gscf"));
  rep.p_duration_rho = detail::permutation_p_value(dur, rho, rep.r_duration_rho, n_permutations,
                                                   substream(seed, "perm-rho"));
  return rep;
}

}  // namespace groupmob
