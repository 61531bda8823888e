#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "groupmob/contacts.hpp"

namespace groupmob {

struct WindowConfig {
  std::int64_t tw_seconds = 3600;
  Timestamp origin = 0;  // window alignment timestamp

  // Origin defaults to midnight UTC of the day holding the first record, so
  // hour-of-day statistics line up with wall-clock hours.
  static WindowConfig for_trace(const ContactTrace& trace, std::int64_t tw_seconds = 3600) {
    if (tw_seconds <= 0) throw std::invalid_argument("tw_seconds must be positive");
    WindowConfig cfg;
    cfg.tw_seconds = tw_seconds;
    cfg.origin = trace.empty() ? 0 : floor_div(trace.t_min(), 86400) * 86400;
    return cfg;
  }
};

inline std::int64_t window_index(Timestamp t, const WindowConfig& cfg) {
  return floor_div(t - cfg.origin, cfg.tw_seconds);
}

inline Timestamp window_start(std::int64_t window, const WindowConfig& cfg) {
  return cfg.origin + window * cfg.tw_seconds;
}

inline int hour_of_day(std::int64_t window, const WindowConfig& cfg) {
  const Timestamp t = window_start(window, cfg);
  const std::int64_t sec = ((t % 86400) + 86400) % 86400;
  return static_cast<int>(sec / 3600);
}

enum class WeightMode { Count, Duration };

/// Undirected edge-weighted graph of one time window. Immutable once built;
/// edges and neighbor lists iterate in ascending order.
class ContactGraph {
 public:
  explicit ContactGraph(std::int64_t window = -1) : window_(window) {}

  std::int64_t window() const { return window_; }

  void add_edge(NodePair p, double w) {
    if (p.a == p.b) throw std::invalid_argument("self edge");
    if (p.a > p.b) std::swap(p.a, p.b);
    auto [it, inserted] = edges_.try_emplace(p, w);
    if (!inserted) {
      it->second += w;
      return;
    }
    insert_sorted(adj_[p.a], p.b);
    insert_sorted(adj_[p.b], p.a);
  }

  bool has_edge(NodePair p) const {
    if (p.a > p.b) std::swap(p.a, p.b);
    return edges_.count(p) != 0;
  }

  double weight(NodePair p) const {
    if (p.a > p.b) std::swap(p.a, p.b);
    auto it = edges_.find(p);
    return it == edges_.end() ? 0.0 : it->second;
  }

  const std::map<NodePair, double>& edges() const { return edges_; }

  const std::vector<NodeId>& neighbors(NodeId n) const {
    static const std::vector<NodeId> kEmpty;
    auto it = adj_.find(n);
    return it == adj_.end() ? kEmpty : it->second;
  }

  bool has_vertex(NodeId n) const { return adj_.count(n) != 0; }

  std::vector<NodeId> vertices() const {
    std::vector<NodeId> out;
    out.reserve(adj_.size());
    for (const auto& [n, _] : adj_) out.push_back(n);
    return out;
  }

  std::size_t vertex_count() const { return adj_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

 private:
  static void insert_sorted(std::vector<NodeId>& v, NodeId n) {
    v.insert(std::upper_bound(v.begin(), v.end(), n), n);
  }

  std::int64_t window_;
  std::map<NodePair, double> edges_;
  std::map<NodeId, std::vector<NodeId>> adj_;
};

/// Aggregates the records of window `w` into a graph. Count mode weights edges
/// by contact count; duration mode sums contact durations and requires every
/// in-window record to carry one.
inline ContactGraph build_window_graph(const ContactTrace& trace, std::int64_t w,
                                       const WindowConfig& cfg,
                                       WeightMode mode = WeightMode::Count) {
  const Timestamp lo = window_start(w, cfg);
  const Timestamp hi = lo + cfg.tw_seconds;
  std::map<NodePair, double> weights;
  for (const auto& r : trace.records_in(lo, hi)) {
    if (mode == WeightMode::Duration) {
      if (!r.duration)
        throw std::runtime_error("duration mode requires durations on all records");
      weights[r.pair] += static_cast<double>(*r.duration);
    } else {
      weights[r.pair] += 1.0;
    }
  }
  ContactGraph g(w);
  for (const auto& [pair, weight] : weights)
    if (weight > 0) g.add_edge(pair, weight);
  return g;
}

/// Whole-trace aggregate graph (window index -1).
inline ContactGraph aggregate_graph(const ContactTrace& trace,
                                    WeightMode mode = WeightMode::Count) {
  std::map<NodePair, double> weights;
  for (const auto& r : trace.records()) {
    if (mode == WeightMode::Duration) {
      if (!r.duration)
        throw std::runtime_error("duration mode requires durations on all records");
      weights[r.pair] += static_cast<double>(*r.duration);
    } else {
      weights[r.pair] += 1.0;
    }
  }
  ContactGraph g(-1);
  for (const auto& [pair, weight] : weights)
    if (weight > 0) g.add_edge(pair, weight);
  return g;
}

/// Keeps exactly the edges with weight >= w_th; vertices left without edges are
/// dropped.
inline ContactGraph apply_weight_threshold(const ContactGraph& g, int w_th) {
  if (w_th < 1) throw std::invalid_argument("w_th must be >= 1");
  ContactGraph out(g.window());
  for (const auto& [pair, weight] : g.edges())
    if (weight >= static_cast<double>(w_th)) out.add_edge(pair, weight);
  return out;
}

// Inclusive window range covered by the trace; {0, -1} when empty.
inline std::pair<std::int64_t, std::int64_t> window_range(const ContactTrace& trace,
                                                          const WindowConfig& cfg) {
  if (trace.empty()) return {0, -1};
  return {window_index(trace.t_min(), cfg), window_index(trace.t_max(), cfg)};
}

}  // namespace groupmob
