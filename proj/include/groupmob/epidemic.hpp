#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupmob/cpm.hpp"
#include "groupmob/graph.hpp"

namespace groupmob {

// UTC calendar helpers for the monthly campaigns.

inline Timestamp parse_month_utc(const std::string& ym) {
  if (ym.size() != 7 || ym[4] != '-')
    throw std::runtime_error("bad month '" + ym + "', expected YYYY-MM");
  const int y = std::stoi(ym.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(ym.substr(5, 2)));
  if (m < 1 || m > 12) throw std::runtime_error("bad month '" + ym + "'");
  using namespace std::chrono;
  const sys_days d{year{y} / month{m} / 1};
  return duration_cast<seconds>(d.time_since_epoch()).count();
}

inline Timestamp next_month_start(Timestamp t) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const year_month_day ymd{floor<days>(tp)};
  const year_month next = year_month{ymd.year(), ymd.month()} + months{1};
  const sys_days d{next.year() / next.month() / 1};
  return duration_cast<seconds>(d.time_since_epoch()).count();
}

inline std::string month_label(Timestamp t) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const year_month_day ymd{floor<days>(tp)};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", int(ymd.year()), unsigned(ymd.month()));
  return buf;
}

// First day of every calendar month intersecting the trace span.
inline std::vector<Timestamp> months_spanning(const ContactTrace& trace) {
  std::vector<Timestamp> out;
  if (trace.empty()) return out;
  Timestamp m = parse_month_utc(month_label(trace.t_min()));
  while (m <= trace.t_max()) {
    out.push_back(m);
    m = next_month_start(m);
  }
  return out;
}

struct CampaignConfig {
  NodeId origin = 0;
  Timestamp t0 = 0;
  std::int64_t ttl_seconds = 7 * 86400;
  std::int64_t lookback_seconds = 30 * 86400;
};

/// Nodes that shared a detected group with the origin in a window starting
/// within [t0 - lookback, t0); the window containing t0 itself is excluded.
inline std::vector<NodeId> group_peers(const PerWindowGroups& groups, NodeId origin,
                                       Timestamp t0, std::int64_t lookback,
                                       const WindowConfig& cfg) {
  if (lookback <= 0) throw std::invalid_argument("lookback must be positive");
  const std::int64_t w_lo = window_index(t0 - lookback, cfg);
  const std::int64_t w_hi = window_index(t0, cfg);
  std::set<NodeId> peers;
  for (auto it = groups.lower_bound(w_lo); it != groups.end() && it->first < w_hi; ++it) {
    for (const Group& g : it->second) {
      if (!std::binary_search(g.members.begin(), g.members.end(), origin)) continue;
      peers.insert(g.members.begin(), g.members.end());
    }
  }
  peers.erase(origin);
  return {peers.begin(), peers.end()};
}

/// Flooding over the contact sequence: the origin holds the message at t0 and
/// every contact in (t0, t0+ttl] between a holder and a non-holder transfers it
/// at the contact timestamp. Contacts sharing a timestamp are applied to
/// fixpoint, so file order never matters. Returns node -> infection time,
/// origin included at t0.
inline std::map<NodeId, Timestamp> epidemic_spread(const ContactTrace& trace, NodeId origin,
                                                   Timestamp t0, std::int64_t ttl) {
  if (ttl <= 0) throw std::invalid_argument("ttl must be positive");
  if (!trace.has_node(origin))
    throw std::runtime_error("origin " + std::to_string(origin) + " absent from trace");
  std::map<NodeId, Timestamp> infected{{origin, t0}};
  const auto records = trace.records_in(t0 + 1, t0 + ttl + 1);
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    while (j < records.size() && records[j].timestamp == records[i].timestamp) ++j;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t r = i; r < j; ++r) {
        const bool ia = infected.count(records[r].pair.a) != 0;
        const bool ib = infected.count(records[r].pair.b) != 0;
        if (ia == ib) continue;
        infected.emplace(ia ? records[r].pair.b : records[r].pair.a, records[r].timestamp);
        changed = true;
      }
    }
    i = j;
  }
  return infected;
}

struct CampaignResult {
  NodeId origin = 0;
  Timestamp t0 = 0;
  bool origin_active = true;  // false when the origin had no contact in the month
  std::map<NodeId, Timestamp> delivered;  // non-origin nodes reached within ttl
  std::vector<NodeId> in_group;           // group peers of the origin before t0
  std::vector<NodeId> out_group;          // remaining non-origin nodes
  double ratio_in = 0;
  double ratio_out = 0;
};

inline CampaignResult run_campaign(const ContactTrace& trace, const PerWindowGroups& groups,
                                   const CampaignConfig& cc, const WindowConfig& cfg) {
  CampaignResult res;
  res.origin = cc.origin;
  res.t0 = cc.t0;
  res.in_group = group_peers(groups, cc.origin, cc.t0, cc.lookback_seconds, cfg);
  for (NodeId n : trace.nodes()) {
    if (n == cc.origin) continue;
    if (!std::binary_search(res.in_group.begin(), res.in_group.end(), n))
      res.out_group.push_back(n);
  }
  auto infected = epidemic_spread(trace, cc.origin, cc.t0, cc.ttl_seconds);
  infected.erase(cc.origin);
  res.delivered = std::move(infected);
  auto ratio = [&](const std::vector<NodeId>& cls) {
    if (cls.empty()) return 0.0;
    std::size_t hit = 0;
    for (NodeId n : cls) hit += res.delivered.count(n);
    return static_cast<double>(hit) / static_cast<double>(cls.size());
  };
  res.ratio_in = ratio(res.in_group);
  res.ratio_out = ratio(res.out_group);
  return res;
}

struct MonthCampaigns {
  std::string label;
  Timestamp month_start = 0;
  Timestamp month_end = 0;
  std::vector<CampaignResult> results;  // one per node, ascending by node id
  std::size_t active_origins = 0;
  double mean_ratio_in = 0;   // over active origins
  double mean_ratio_out = 0;  // over active origins
};

/// One campaign per (month, node): the node becomes the origin at its first
/// contact inside the month. Nodes silent for the whole month keep zero ratios
/// and are left out of the monthly means.
inline std::vector<MonthCampaigns> monthly_campaigns(const ContactTrace& trace,
                                                     const PerWindowGroups& groups,
                                                     const WindowConfig& cfg,
                                                     const std::vector<Timestamp>& month_starts,
                                                     std::int64_t ttl, std::int64_t lookback) {
  std::vector<MonthCampaigns> out;
  for (const Timestamp start : month_starts) {
    MonthCampaigns mc;
    mc.label = month_label(start);
    mc.month_start = start;
    mc.month_end = next_month_start(start);
    std::map<NodeId, Timestamp> first_contact;
    for (const auto& r : trace.records_in(mc.month_start, mc.month_end)) {
      first_contact.try_emplace(r.pair.a, r.timestamp);
      first_contact.try_emplace(r.pair.b, r.timestamp);
    }
    for (NodeId origin : trace.nodes()) {
      auto it = first_contact.find(origin);
      if (it == first_contact.end()) {
        CampaignResult res;
        res.origin = origin;
        res.t0 = mc.month_start;
        res.origin_active = false;
        res.in_group = group_peers(groups, origin, mc.month_start, lookback, cfg);
        for (NodeId n : trace.nodes()) {
          if (n == origin) continue;
          if (!std::binary_search(res.in_group.begin(), res.in_group.end(), n))
            res.out_group.push_back(n);
        }
        mc.results.push_back(std::move(res));
        continue;
      }
      CampaignConfig cc{origin, it->second, ttl, lookback};
      mc.results.push_back(run_campaign(trace, groups, cc, cfg));
      mc.mean_ratio_in += mc.results.back().ratio_in;
      mc.mean_ratio_out += mc.results.back().ratio_out;
      ++mc.active_origins;
    }
    if (mc.active_origins > 0) {
      mc.mean_ratio_in /= static_cast<double>(mc.active_origins);
      mc.mean_ratio_out /= static_cast<double>(mc.active_origins);
    }
    out.push_back(std::move(mc));
  }
  return out;
}

}  // namespace groupmob
