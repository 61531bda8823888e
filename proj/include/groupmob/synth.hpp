#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "groupmob/contacts.hpp"
#include "groupmob/rng.hpp"

namespace groupmob {

// Synthetic traces with planted group structure, for end-to-end verification.
// Day 0 starts at t = 0, so window indices line up as day*24 + hour under the
// default one-hour windows.

struct PlantedGroup {
  std::vector<NodeId> members;
  int hour = 9;              // daily meeting hour, 0..23
  bool weekly_only = false;  // meets only on days divisible by 7
  double churn = 0.0;        // per-member replacement probability per meeting
};

struct SynthSpec {
  NodeId node_count = 20;
  int day_count = 14;
  std::vector<PlantedGroup> groups;
  double noise_contacts_per_hour = 0.0;  // Poisson mean of random contacts per hour
  std::int64_t tick_seconds = 318;       // sampling cadence inside a meeting hour
  std::uint64_t seed = 1;
};

struct PlantedMeeting {
  int group = 0;
  int day = 0;
  std::int64_t window = 0;  // day*24 + hour
  std::vector<NodeId> members;
};

struct SynthResult {
  ContactTrace trace;
  std::vector<PlantedMeeting> meetings;
};

/// Generates the trace: every planted group's current roster meets pairwise at
/// each sampling tick of its scheduled hour, rosters churn between meetings,
/// and uniform noise contacts are sprinkled per hour. Identical (spec, seed)
/// always yields identical traces.
inline SynthResult synth_trace(const SynthSpec& spec) {
  if (spec.node_count < 2) throw std::invalid_argument("node_count must be >= 2");
  if (spec.day_count < 1) throw std::invalid_argument("day_count must be >= 1");
  if (spec.tick_seconds < 1 || spec.tick_seconds > 3600)
    throw std::invalid_argument("tick_seconds must be in [1, 3600]");
  if (spec.noise_contacts_per_hour < 0) throw std::invalid_argument("negative noise rate");
  for (const auto& g : spec.groups) {
    if (g.members.empty()) throw std::invalid_argument("planted group with no members");
    if (g.hour < 0 || g.hour > 23) throw std::invalid_argument("meeting hour out of range");
    if (g.churn < 0 || g.churn > 1) throw std::invalid_argument("churn out of [0, 1]");
    std::set<NodeId> uniq(g.members.begin(), g.members.end());
    if (uniq.size() != g.members.size())
      throw std::invalid_argument("duplicate member in planted group");
    for (NodeId m : g.members)
      if (m < 0 || m >= spec.node_count)
        throw std::invalid_argument("planted member outside node range");
    if (g.churn > 0 && static_cast<NodeId>(g.members.size()) >= spec.node_count)
      throw std::invalid_argument("churn needs spare nodes outside the group");
  }

  const std::int64_t ticks_per_hour = 3600 / spec.tick_seconds;
  std::vector<ContactRecord> records;
  SynthResult result;

  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
    const PlantedGroup& g = spec.groups[gi];
    auto rng = substream(spec.seed, "synth-churn", gi);
    std::vector<NodeId> roster = g.members;
    std::sort(roster.begin(), roster.end());
    bool first_meeting = true;
    for (int day = 0; day < spec.day_count; ++day) {
      if (g.weekly_only && day % 7 != 0) continue;
      if (!first_meeting && g.churn > 0) {
        for (auto& member : roster) {
          if (uniform_real(rng) >= g.churn) continue;
          NodeId candidate;
          do {
            candidate = static_cast<NodeId>(
                uniform_index(rng, static_cast<std::uint64_t>(spec.node_count)));
          } while (std::find(roster.begin(), roster.end(), candidate) != roster.end());
          member = candidate;
        }
        std::sort(roster.begin(), roster.end());
      }
      first_meeting = false;
      const Timestamp base = static_cast<Timestamp>(day) * 86400 + g.hour * 3600;
      for (std::int64_t tick = 0; tick < ticks_per_hour; ++tick) {
        const Timestamp t = base + tick * spec.tick_seconds;
        for (std::size_t i = 0; i < roster.size(); ++i)
          for (std::size_t j = i + 1; j < roster.size(); ++j)
            records.push_back({NodePair::of(roster[i], roster[j]), t, std::nullopt});
      }
      result.meetings.push_back({static_cast<int>(gi), day,
                                 static_cast<std::int64_t>(day) * 24 + g.hour, roster});
    }
  }

  if (spec.noise_contacts_per_hour > 0) {
    auto rng = substream(spec.seed, "synth-noise");
    const std::int64_t hours = static_cast<std::int64_t>(spec.day_count) * 24;
    for (std::int64_t h = 0; h < hours; ++h) {
      const int n = poisson_draw(rng, spec.noise_contacts_per_hour);
      for (int c = 0; c < n; ++c) {
        const auto u = static_cast<NodeId>(
            uniform_index(rng, static_cast<std::uint64_t>(spec.node_count)));
        auto v = static_cast<NodeId>(
            uniform_index(rng, static_cast<std::uint64_t>(spec.node_count - 1)));
        if (v >= u) ++v;
        const Timestamp t = h * 3600 + static_cast<Timestamp>(uniform_index(
                                           rng, static_cast<std::uint64_t>(ticks_per_hour))) *
                                           spec.tick_seconds;
        records.push_back({NodePair::of(u, v), t, std::nullopt});
      }
    }
  }

  result.trace = ContactTrace::from_records(std::move(records));
  return result;
}

}  // namespace groupmob
