#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "groupmob/contacts.hpp"
#include "groupmob/graph.hpp"
#include "groupmob/rng.hpp"

namespace groupmob {

// Social/random separation of node pairs from two features: edge persistence
// (fraction of aggregation periods in which the pair is in contact) and
// topological overlap (Jaccard similarity of the pair's neighbor sets on the
// whole-trace aggregate graph), each compared against a randomized null model.

enum class EdgeClass { Friend, Bridge, Acquaintance, Random };

inline std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Friend: return "friend";
    case EdgeClass::Bridge: return "bridge";
    case EdgeClass::Acquaintance: return "acquaintance";
    case EdgeClass::Random: return "random";
  }
  return "random";
}

inline EdgeClass edge_class_from_string(std::string_view s) {
  if (s == "friend") return EdgeClass::Friend;
  if (s == "bridge") return EdgeClass::Bridge;
  if (s == "acquaintance") return EdgeClass::Acquaintance;
  if (s == "random") return EdgeClass::Random;
  throw std::runtime_error("unknown edge class: " + std::string(s));
}

struct EdgeFeatures {
  NodePair pair;
  double persistence = 0.0;  // in [0, 1]
  double overlap = 0.0;      // in [0, 1]
};

struct Thresholds {
  double t_per = 0.0;
  double t_to = 0.0;
};

struct EdgeClassification {
  NodePair pair;
  EdgeClass cls = EdgeClass::Random;
  Thresholds thresholds;
};

struct RecastConfig {
  std::int64_t period_seconds = 86400;  // persistence aggregation period
  int n_samples = 100;
  double percentile = 0.95;
  std::uint64_t seed = 1;
};

namespace detail {

// Period slices anchor at the first record, which keeps persistence invariant
// under time translation of the whole trace.
inline std::int64_t period_slice(Timestamp t, Timestamp t_min, std::int64_t period) {
  return floor_div(t - t_min, period);
}

inline std::int64_t total_period_slices(const ContactTrace& trace, std::int64_t period) {
  if (trace.empty()) throw std::runtime_error("empty trace");
  return period_slice(trace.t_max(), trace.t_min(), period) + 1;
}

// value at the nearest-rank percentile of a sorted sample; p=1 gives the max.
inline double percentile_of_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  if (rank == 0) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

inline double overlap_of_sorted_neighbors(const std::vector<NodeId>& nu,
                                          const std::vector<NodeId>& nv, NodeId u, NodeId v) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  auto it = nu.begin();
  auto jt = nv.begin();
  while (it != nu.end() || jt != nv.end()) {
    NodeId n;
    if (jt == nv.end() || (it != nu.end() && *it < *jt)) {
      n = *it++;
    } else if (it == nu.end() || *jt < *it) {
      n = *jt++;
    } else {
      n = *it;
      ++it;
      ++jt;
      if (n != u && n != v) ++inter;
    }
    if (n != u && n != v) ++uni;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

inline double edge_persistence(const ContactTrace& trace, NodePair pair,
                               std::int64_t period_seconds = 86400) {
  if (period_seconds <= 0) throw std::invalid_argument("period_seconds must be positive");
  const std::int64_t total = detail::total_period_slices(trace, period_seconds);
  std::set<std::int64_t> active;
  for (const auto& r : trace.records())
    if (r.pair == pair)
      active.insert(detail::period_slice(r.timestamp, trace.t_min(), period_seconds));
  return static_cast<double>(active.size()) / static_cast<double>(total);
}

/// |N(u) ∩ N(v)| / |(N(u) ∪ N(v)) \ {u,v}| on the aggregate graph; 0 when the
/// denominator is empty.
inline double topological_overlap(const ContactGraph& agg, NodeId u, NodeId v) {
  if (!agg.has_edge(NodePair::of(u, v))) throw std::invalid_argument("missing edge");
  return detail::overlap_of_sorted_neighbors(agg.neighbors(u), agg.neighbors(v), u, v);
}

/// Persistence and overlap for every pair present in the trace, ascending by
/// pair.
inline std::vector<EdgeFeatures> edge_features(const ContactTrace& trace,
                                               std::int64_t period_seconds = 86400) {
  if (period_seconds <= 0) throw std::invalid_argument("period_seconds must be positive");
  if (trace.empty()) return {};
  const std::int64_t total = detail::total_period_slices(trace, period_seconds);
  std::map<NodePair, std::set<std::int64_t>> active;
  for (const auto& r : trace.records())
    active[r.pair].insert(detail::period_slice(r.timestamp, trace.t_min(), period_seconds));
  const ContactGraph agg = aggregate_graph(trace);
  std::vector<EdgeFeatures> out;
  out.reserve(active.size());
  for (const auto& [pair, slices] : active) {
    EdgeFeatures f;
    f.pair = pair;
    f.persistence = static_cast<double>(slices.size()) / static_cast<double>(total);
    f.overlap = topological_overlap(agg, pair.a, pair.b);
    out.push_back(f);
  }
  return out;
}

/// Null-model thresholds. For each of n_samples randomized traces, the set of
/// active pairs of every aggregation period is replaced by an equally sized
/// set drawn uniformly (without replacement) from all pairs over the trace's
/// node set; persistence and overlap of the randomized pairs are pooled over
/// all samples and the requested nearest-rank percentile of each pooled
/// distribution is returned.
///
/// Sampling is reproducible by construction: sample s draws from
/// substream(seed, "recast-null", s); periods are visited in ascending order;
/// each period performs a partial Fisher-Yates pass over the ascending list of
/// all node pairs (m swaps with uniform_index, undone in reverse afterwards).
inline Thresholds null_model_thresholds(const ContactTrace& trace, int n_samples = 100,
                                        double percentile = 0.95, std::uint64_t seed = 1,
                                        std::int64_t period_seconds = 86400) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (!(percentile > 0.0 && percentile <= 1.0))
    throw std::invalid_argument("percentile must be in (0, 1]");
  if (period_seconds <= 0) throw std::invalid_argument("period_seconds must be positive");
  if (trace.empty()) return {0.0, 0.0};

  const std::vector<NodeId>& nodes = trace.nodes();
  std::vector<NodePair> all_pairs;
  all_pairs.reserve(nodes.size() * (nodes.size() - 1) / 2);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      all_pairs.push_back({nodes[i], nodes[j]});
  if (all_pairs.empty()) return {0.0, 0.0};

  const std::int64_t total = detail::total_period_slices(trace, period_seconds);
  std::map<std::int64_t, std::set<NodePair>> real_active;
  for (const auto& r : trace.records())
    real_active[detail::period_slice(r.timestamp, trace.t_min(), period_seconds)]
        .insert(r.pair);

  std::vector<std::size_t> idx(all_pairs.size());
  std::vector<double> per_values;
  std::vector<double> to_values;
  for (int s = 0; s < n_samples; ++s) {
    auto rng = substream(seed, "recast-null", static_cast<std::uint64_t>(s));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::map<NodePair, std::int64_t> active_slices;
    std::set<NodePair> sampled_edges;
    std::vector<std::pair<std::size_t, std::size_t>> swaps;
    for (const auto& [period, pairs] : real_active) {
      const std::size_t m = std::min(pairs.size(), all_pairs.size());
      swaps.clear();
      for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(
                               uniform_index(rng, static_cast<std::uint64_t>(idx.size() - i)));
        std::swap(idx[i], idx[j]);
        swaps.emplace_back(i, j);
      }
      for (std::size_t i = 0; i < m; ++i) {
        const NodePair& p = all_pairs[idx[i]];
        active_slices[p] += 1;
        sampled_edges.insert(p);
      }
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) std::swap(idx[it->first], idx[it->second]);
    }
    for (const auto& [pair, cnt] : active_slices)
      per_values.push_back(static_cast<double>(cnt) / static_cast<double>(total));
    ContactGraph agg(-1);
    for (const auto& p : sampled_edges) agg.add_edge(p, 1.0);
    for (const auto& p : sampled_edges)
      to_values.push_back(
          detail::overlap_of_sorted_neighbors(agg.neighbors(p.a), agg.neighbors(p.b), p.a, p.b));
  }
  std::sort(per_values.begin(), per_values.end());
  std::sort(to_values.begin(), to_values.end());
  return {detail::percentile_of_sorted(per_values, percentile),
          detail::percentile_of_sorted(to_values, percentile)};
}

/// Classifies each pair from its features:
///   persistence >= t_per and overlap >= t_to  -> friend
///   persistence >= t_per, overlap  < t_to     -> bridge
///   persistence  < t_per, overlap >= t_to     -> acquaintance
///   both below                                -> random
inline std::vector<EdgeClassification> classify_edges(const std::vector<EdgeFeatures>& features,
                                                      Thresholds th) {
  std::vector<EdgeClassification> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    const bool per = f.persistence >= th.t_per;
    const bool to = f.overlap >= th.t_to;
    EdgeClass cls = per ? (to ? EdgeClass::Friend : EdgeClass::Bridge)
                        : (to ? EdgeClass::Acquaintance : EdgeClass::Random);
    out.push_back({f.pair, cls, th});
  }
  return out;
}

/// Trace restricted to pairs whose relationship is not random.
struct SocialTrace {
  ContactTrace trace;
};

inline SocialTrace strip_random_contacts(const ContactTrace& trace,
                                         const std::vector<EdgeClassification>& classes) {
  std::map<NodePair, EdgeClass> by_pair;
  for (const auto& c : classes) by_pair.emplace(c.pair, c.cls);
  std::vector<ContactRecord> kept;
  for (const auto& r : trace.records()) {
    auto it = by_pair.find(r.pair);
    if (it == by_pair.end())
      throw std::runtime_error("pair (" + std::to_string(r.pair.a) + "," +
                               std::to_string(r.pair.b) + ") missing from classification");
    if (it->second != EdgeClass::Random) kept.push_back(r);
  }
  return SocialTrace{ContactTrace::from_records(std::move(kept))};
}

struct RecastResult {
  SocialTrace social;
  std::vector<EdgeFeatures> features;
  std::vector<EdgeClassification> classes;
  Thresholds thresholds;
};

inline RecastResult recast_filter(const ContactTrace& trace, const RecastConfig& cfg) {
  RecastResult result;
  if (trace.empty()) {
    result.social = SocialTrace{trace};
    return result;
  }
  result.features = edge_features(trace, cfg.period_seconds);
  result.thresholds = null_model_thresholds(trace, cfg.n_samples, cfg.percentile, cfg.seed,
                                            cfg.period_seconds);
  result.classes = classify_edges(result.features, result.thresholds);
  result.social = strip_random_contacts(trace, result.classes);
  return result;
}

}  // namespace groupmob
