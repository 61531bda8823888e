#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "groupmob/contacts.hpp"
#include "groupmob/graph.hpp"

namespace groupmob {

/// Distribution of the time between successive contacts of the same pair,
/// pooled over all pairs. Bins are keyed by their lower edge in seconds.
struct ReencounterProfile {
  std::int64_t bin_seconds = 10;
  std::map<std::int64_t, double> mass;  // bin lower edge -> probability
  std::map<std::int64_t, double> cdf;   // bin lower edge -> cumulative probability

  // P(gap <= t), evaluated on binned gaps.
  double cdf_at(std::int64_t t) const {
    auto it = cdf.upper_bound(t);
    if (it == cdf.begin()) return 0.0;
    return std::prev(it)->second;
  }
};

inline ReencounterProfile reencounter_distribution(const ContactTrace& trace,
                                                   std::int64_t bin_seconds) {
  if (bin_seconds < 1) throw std::invalid_argument("bin_seconds must be >= 1");
  std::map<NodePair, Timestamp> last_seen;
  std::map<std::int64_t, std::int64_t> counts;
  std::int64_t total = 0;
  for (const auto& r : trace.records()) {
    auto [it, first] = last_seen.try_emplace(r.pair, r.timestamp);
    if (!first) {
      const std::int64_t gap = r.timestamp - it->second;
      counts[floor_div(gap, bin_seconds) * bin_seconds] += 1;
      ++total;
      it->second = r.timestamp;
    }
  }
  if (total == 0) throw std::runtime_error("no re-encounters");
  ReencounterProfile profile;
  profile.bin_seconds = bin_seconds;
  double cum = 0.0;
  for (const auto& [bin, n] : counts) {
    const double p = static_cast<double>(n) / static_cast<double>(total);
    profile.mass[bin] = p;
    cum += p;
    profile.cdf[bin] = cum;
  }
  return profile;
}

/// PMF of the number of contacts a pair registers inside one window, over all
/// (pair, window) combinations with at least one contact.
struct ContactsPerHourPdf {
  std::map<std::int64_t, double> pmf;  // contact count k >= 1 -> P(X = k)
};

inline ContactsPerHourPdf contacts_per_hour_pdf(const ContactTrace& trace,
                                                const WindowConfig& cfg) {
  if (trace.empty()) throw std::runtime_error("empty trace");
  std::map<std::pair<NodePair, std::int64_t>, std::int64_t> per_pair_window;
  for (const auto& r : trace.records())
    per_pair_window[{r.pair, window_index(r.timestamp, cfg)}] += 1;
  std::map<std::int64_t, std::int64_t> counts;
  for (const auto& [key, n] : per_pair_window) counts[n] += 1;
  const double total = static_cast<double>(per_pair_window.size());
  ContactsPerHourPdf pdf;
  for (const auto& [k, n] : counts) pdf.pmf[k] = static_cast<double>(n) / total;
  return pdf;
}

struct ParameterRecommendation {
  std::int64_t tw_seconds = 3600;
  int w_th = 2;
};

/// Suggests (tw, w_th) from the two profiles. tw is the smallest multiple of
/// base_granularity whose re-encounter CDF reaches `coverage` (searched up to 7
/// days of gap). w_th is the smallest k >= 2 such that P(X = k-1) is a local
/// maximum sitting at least twice above the mean of P(X = 2 .. k+10); when no
/// such k exists the fallback is 2. The rule is a heuristic; callers may always
/// override.
inline ParameterRecommendation recommend_parameters(const ReencounterProfile& re,
                                                    const ContactsPerHourPdf& pdf,
                                                    double coverage = 0.95,
                                                    std::int64_t base_granularity = 3600) {
  if (!(coverage > 0.0 && coverage < 1.0))
    throw std::invalid_argument("coverage must be in (0, 1)");
  if (base_granularity < 1) throw std::invalid_argument("base_granularity must be >= 1");

  ParameterRecommendation rec;
  constexpr std::int64_t kMaxGap = 7 * 86400;
  bool found = false;
  for (std::int64_t tw = base_granularity; tw <= kMaxGap; tw += base_granularity) {
    if (re.cdf_at(tw) >= coverage) {
      rec.tw_seconds = tw;
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("coverage unreachable within 7 days of gap");

  auto p = [&pdf](std::int64_t k) {
    auto it = pdf.pmf.find(k);
    return it == pdf.pmf.end() ? 0.0 : it->second;
  };
  std::int64_t max_k = pdf.pmf.empty() ? 1 : pdf.pmf.rbegin()->first;
  rec.w_th = 2;
  for (std::int64_t k = 2; k <= max_k + 1; ++k) {
    const double cand = p(k - 1);
    if (cand <= p(k)) continue;
    if (k - 2 >= 1 && cand <= p(k - 2)) continue;
    double plateau = 0.0;
    for (std::int64_t j = 2; j <= k + 10; ++j) plateau += p(j);
    plateau /= static_cast<double>(k + 10 - 2 + 1);
    if (plateau > 0.0 && cand >= 2.0 * plateau) {
      rec.w_th = static_cast<int>(k);
      break;
    }
  }
  return rec;
}

}  // namespace groupmob
