#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "groupmob/cpm.hpp"
#include "groupmob/graph.hpp"

namespace groupmob {

/// Jaccard similarity of two member sets (the group correlation coefficient):
/// |G1 ∩ G2| / |G1 ∪ G2|. Inputs are sorted node sets.
inline double correlation_coefficient(const std::vector<NodeId>& g1,
                                      const std::vector<NodeId>& g2) {
  if (g1.empty() && g2.empty()) throw std::invalid_argument("both groups empty");
  std::size_t inter = 0;
  auto it = g1.begin();
  auto jt = g2.begin();
  while (it != g1.end() && jt != g2.end()) {
    if (*it < *jt) {
      ++it;
    } else if (*jt < *it) {
      ++jt;
    } else {
      ++inter;
      ++it;
      ++jt;
    }
  }
  const std::size_t uni = g1.size() + g2.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct GroupMatch {
  int prev_index = -1;
  int next_index = -1;
  double rho = 0.0;
};

/// One-to-one matching between the groups of two consecutive windows. A pair is
/// a candidate when rho strictly exceeds rho_th; candidates are taken greedily
/// in a total order: descending rho, then larger next group, then
/// lexicographically smaller next member set, then smaller prev member set.
inline std::vector<GroupMatch> match_groups(const std::vector<Group>& prev,
                                            const std::vector<Group>& next,
                                            double rho_th = 0.5) {
  if (!(rho_th > 0.0 && rho_th < 1.0))
    throw std::invalid_argument("rho_th must be in (0, 1)");
  std::vector<GroupMatch> candidates;
  for (std::size_t i = 0; i < prev.size(); ++i)
    for (std::size_t j = 0; j < next.size(); ++j) {
      const double rho = correlation_coefficient(prev[i].members, next[j].members);
      if (rho > rho_th)
        candidates.push_back({static_cast<int>(i), static_cast<int>(j), rho});
    }
  std::sort(candidates.begin(), candidates.end(),
            [&](const GroupMatch& x, const GroupMatch& y) {
              if (x.rho != y.rho) return x.rho > y.rho;
              const auto& nx = next[static_cast<std::size_t>(x.next_index)].members;
              const auto& ny = next[static_cast<std::size_t>(y.next_index)].members;
              if (nx.size() != ny.size()) return nx.size() > ny.size();
              if (nx != ny) return nx < ny;
              return prev[static_cast<std::size_t>(x.prev_index)].members <
                     prev[static_cast<std::size_t>(y.prev_index)].members;
            });
  std::vector<bool> prev_used(prev.size(), false), next_used(next.size(), false);
  std::vector<GroupMatch> out;
  for (const auto& c : candidates) {
    if (prev_used[static_cast<std::size_t>(c.prev_index)] ||
        next_used[static_cast<std::size_t>(c.next_index)])
      continue;
    prev_used[static_cast<std::size_t>(c.prev_index)] = true;
    next_used[static_cast<std::size_t>(c.next_index)] = true;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const GroupMatch& x, const GroupMatch& y) { return x.prev_index < y.prev_index; });
  return out;
}

// Matches of every transition w -> w+1, keyed by the earlier window.
using TransitionMatches = std::map<std::int64_t, std::vector<GroupMatch>>;

inline TransitionMatches match_all_transitions(const PerWindowGroups& groups,
                                               double rho_th = 0.5) {
  TransitionMatches out;
  if (groups.empty()) return out;
  static const std::vector<Group> kNone;
  const std::int64_t first = groups.begin()->first;
  const std::int64_t last = groups.rbegin()->first;
  for (std::int64_t w = first; w < last; ++w) {
    auto pit = groups.find(w);
    auto nit = groups.find(w + 1);
    const auto& prev = pit == groups.end() ? kNone : pit->second;
    const auto& next = nit == groups.end() ? kNone : nit->second;
    out[w] = match_groups(prev, next, rho_th);
  }
  return out;
}

/// A tracked group meeting: a maximal chain of matched groups over consecutive
/// windows, with the rho of every step.
struct GroupTimeline {
  int timeline_id = -1;
  std::int64_t first_window = 0;
  std::vector<std::vector<NodeId>> member_sets;  // one per window
  std::vector<double> rho_steps;                 // member_sets.size() - 1 entries

  std::int64_t last_window() const {
    return first_window + static_cast<std::int64_t>(member_sets.size()) - 1;
  }
  // meeting duration in windows (hours when tw is one hour)
  std::int64_t length_windows() const {
    return static_cast<std::int64_t>(member_sets.size());
  }
};

inline std::vector<GroupTimeline> build_timelines(const PerWindowGroups& groups,
                                                  double rho_th = 0.5) {
  std::vector<GroupTimeline> timelines;
  if (groups.empty()) return timelines;
  const TransitionMatches matches = match_all_transitions(groups, rho_th);
  const std::int64_t first = groups.begin()->first;
  const std::int64_t last = groups.rbegin()->first;
  static const std::vector<Group> kNone;
  auto groups_at = [&](std::int64_t w) -> const std::vector<Group>& {
    auto it = groups.find(w);
    return it == groups.end() ? kNone : it->second;
  };

  std::map<int, std::size_t> open;  // position in current window's group vector -> timeline slot
  {
    const auto& head = groups_at(first);
    for (std::size_t i = 0; i < head.size(); ++i) {
      open[static_cast<int>(i)] = timelines.size();
      timelines.push_back({-1, first, {head[i].members}, {}});
    }
  }
  for (std::int64_t w = first; w < last; ++w) {
    const auto& next = groups_at(w + 1);
    std::map<int, std::size_t> next_open;
    auto mit = matches.find(w);
    if (mit != matches.end()) {
      for (const GroupMatch& m : mit->second) {
        const std::size_t slot = open.at(m.prev_index);
        timelines[slot].member_sets.push_back(
            next[static_cast<std::size_t>(m.next_index)].members);
        timelines[slot].rho_steps.push_back(m.rho);
        next_open[m.next_index] = slot;
      }
    }
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next_open.count(static_cast<int>(i))) continue;  // extended an existing timeline
      next_open[static_cast<int>(i)] = timelines.size();
      timelines.push_back({-1, w + 1, {next[i].members}, {}});
    }
    open = std::move(next_open);
  }

  std::sort(timelines.begin(), timelines.end(),
            [](const GroupTimeline& a, const GroupTimeline& b) {
              if (a.first_window != b.first_window) return a.first_window < b.first_window;
              return a.member_sets < b.member_sets;
            });
  for (std::size_t i = 0; i < timelines.size(); ++i)
    timelines[i].timeline_id = static_cast<int>(i);
  return timelines;
}

struct EvolutionCounts {
  std::int64_t unchanged = 0;
  std::int64_t growth = 0;
  std::int64_t contraction = 0;
  std::int64_t birth = 0;
  std::int64_t death = 0;
};

struct TransitionTally {
  std::int64_t window_to = 0;  // the later window of the transition
  int hour = 0;                // its wall-clock hour
  EvolutionCounts counts;
};

struct EvolutionTally {
  std::vector<TransitionTally> transitions;

  std::array<EvolutionCounts, 24> by_hour() const {
    std::array<EvolutionCounts, 24> hours{};
    for (const auto& t : transitions) {
      auto& h = hours[static_cast<std::size_t>(t.hour)];
      h.unchanged += t.counts.unchanged;
      h.growth += t.counts.growth;
      h.contraction += t.counts.contraction;
      h.birth += t.counts.birth;
      h.death += t.counts.death;
    }
    return hours;
  }
};

/// Per transition: matched pairs count as unchanged/growth/contraction by
/// cardinality ("unchanged" keeps the same number of nodes, not necessarily the
/// same nodes); unmatched next groups are births, unmatched prev groups deaths.
/// Events are bucketed by the hour of the later window.
inline EvolutionTally classify_evolution(const PerWindowGroups& groups,
                                         const TransitionMatches& matches,
                                         const WindowConfig& cfg) {
  EvolutionTally tally;
  if (groups.empty()) return tally;
  static const std::vector<Group> kNone;
  auto groups_at = [&](std::int64_t w) -> const std::vector<Group>& {
    auto it = groups.find(w);
    return it == groups.end() ? kNone : it->second;
  };
  const std::int64_t first = groups.begin()->first;
  const std::int64_t last = groups.rbegin()->first;
  for (std::int64_t w = first; w < last; ++w) {
    const auto& prev = groups_at(w);
    const auto& next = groups_at(w + 1);
    TransitionTally t;
    t.window_to = w + 1;
    t.hour = hour_of_day(w + 1, cfg);
    std::vector<bool> prev_matched(prev.size(), false), next_matched(next.size(), false);
    auto mit = matches.find(w);
    if (mit != matches.end()) {
      for (const GroupMatch& m : mit->second) {
        prev_matched[static_cast<std::size_t>(m.prev_index)] = true;
        next_matched[static_cast<std::size_t>(m.next_index)] = true;
        const std::size_t np = prev[static_cast<std::size_t>(m.prev_index)].members.size();
        const std::size_t nn = next[static_cast<std::size_t>(m.next_index)].members.size();
        if (nn == np)
          ++t.counts.unchanged;
        else if (nn > np)
          ++t.counts.growth;
        else
          ++t.counts.contraction;
      }
    }
    for (bool m : prev_matched)
      if (!m) ++t.counts.death;
    for (bool m : next_matched)
      if (!m) ++t.counts.birth;
    tally.transitions.push_back(t);
  }
  return tally;
}

/// Meetings of the "same" group chained across gaps. gaps_end_to_start is the
/// stored inter-meeting gap (first window of meeting j+1 minus one past the
/// last window of meeting j); gaps_start_to_start feeds the periodicity
/// histogram, where a daily one-hour meeting shows up as a 24-window gap.
struct GroupHistory {
  int history_id = -1;
  std::vector<int> timeline_ids;
  std::vector<std::int64_t> gaps_end_to_start;    // in windows
  std::vector<std::int64_t> gaps_start_to_start;  // in windows
};

/// Chains timelines chronologically: a timeline joins the history whose most
/// recent meeting ended before it starts and whose final member set matches its
/// first member set with rho > rho_th (highest rho wins; ties prefer the
/// lexicographically smaller final member set, then the older history).
inline std::vector<GroupHistory> link_remeetings(const std::vector<GroupTimeline>& timelines,
                                                 double rho_th = 0.5) {
  if (!(rho_th > 0.0 && rho_th < 1.0))
    throw std::invalid_argument("rho_th must be in (0, 1)");
  std::vector<std::size_t> order(timelines.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (timelines[a].first_window != timelines[b].first_window)
      return timelines[a].first_window < timelines[b].first_window;
    if (timelines[a].member_sets != timelines[b].member_sets)
      return timelines[a].member_sets < timelines[b].member_sets;
    return timelines[a].timeline_id < timelines[b].timeline_id;
  });

  std::vector<GroupHistory> histories;
  std::vector<std::size_t> tail;  // index into timelines of each history's last meeting
  for (std::size_t ti : order) {
    const GroupTimeline& t = timelines[ti];
    int best = -1;
    double best_rho = 0.0;
    for (std::size_t h = 0; h < histories.size(); ++h) {
      const GroupTimeline& last = timelines[tail[h]];
      if (last.last_window() >= t.first_window) continue;
      const double rho =
          correlation_coefficient(last.member_sets.back(), t.member_sets.front());
      if (rho <= rho_th) continue;
      if (best < 0 || rho > best_rho ||
          (rho == best_rho &&
           timelines[tail[static_cast<std::size_t>(best)]].member_sets.back() >
               last.member_sets.back())) {
        best = static_cast<int>(h);
        best_rho = rho;
      }
    }
    if (best < 0) {
      GroupHistory h;
      h.history_id = static_cast<int>(histories.size());
      h.timeline_ids.push_back(t.timeline_id);
      histories.push_back(std::move(h));
      tail.push_back(ti);
    } else {
      auto& h = histories[static_cast<std::size_t>(best)];
      const GroupTimeline& last = timelines[tail[static_cast<std::size_t>(best)]];
      h.timeline_ids.push_back(t.timeline_id);
      h.gaps_end_to_start.push_back(t.first_window - last.last_window() - 1);
      h.gaps_start_to_start.push_back(t.first_window - last.first_window);
      tail[static_cast<std::size_t>(best)] = ti;
    }
  }
  return histories;
}

}  // namespace groupmob
