#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace groupmob {

using NodeId = std::int64_t;
using Timestamp = std::int64_t;

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

// Failure while parsing line-oriented input; line numbers start at 1.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Unordered node pair, stored with a < b.
struct NodePair {
  NodeId a = 0;
  NodeId b = 0;

  static NodePair of(NodeId u, NodeId v) {
    if (u == v) throw std::invalid_argument("self pair");
    return u < v ? NodePair{u, v} : NodePair{v, u};
  }

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct ContactRecord {
  NodePair pair;
  Timestamp timestamp = 0;
  std::optional<std::int64_t> duration;  // seconds, when the trace carries them

  friend bool operator==(const ContactRecord&, const ContactRecord&) = default;
};

inline bool record_before(const ContactRecord& x, const ContactRecord& y) {
  auto key = [](const ContactRecord& r) {
    return std::tuple(r.timestamp, r.pair.a, r.pair.b, r.duration.value_or(-1));
  };
  return key(x) < key(y);
}

/// Canonical proximity trace: records sorted by (timestamp, pair), pairs stored
/// min-id first, duplicate records kept (each one is a distinct contact event).
class ContactTrace {
 public:
  ContactTrace() = default;

  static ContactTrace from_records(std::vector<ContactRecord> records) {
    for (auto& r : records) {
      if (r.pair.a == r.pair.b) throw std::invalid_argument("self contact");
      if (r.pair.a > r.pair.b) std::swap(r.pair.a, r.pair.b);
      if (r.pair.a < 0) throw std::invalid_argument("negative node id");
      if (r.timestamp < 0) throw std::invalid_argument("negative timestamp");
      if (r.duration && *r.duration < 0) throw std::invalid_argument("negative duration");
    }
    std::sort(records.begin(), records.end(), record_before);
    return ContactTrace(std::move(records));
  }

  const std::vector<ContactRecord>& records() const { return records_; }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  bool empty() const { return records_.empty(); }
  Timestamp t_min() const { return records_.empty() ? 0 : records_.front().timestamp; }
  Timestamp t_max() const { return records_.empty() ? 0 : records_.back().timestamp; }

  bool has_node(NodeId n) const {
    return std::binary_search(nodes_.begin(), nodes_.end(), n);
  }

  // Records with lo <= timestamp < hi.
  std::span<const ContactRecord> records_in(Timestamp lo, Timestamp hi) const {
    auto cmp = [](const ContactRecord& r, Timestamp t) { return r.timestamp < t; };
    auto first = std::lower_bound(records_.begin(), records_.end(), lo, cmp);
    auto last = std::lower_bound(first, records_.end(), hi, cmp);
    return {first, last};
  }

 private:
  explicit ContactTrace(std::vector<ContactRecord> records) : records_(std::move(records)) {
    std::set<NodeId> seen;
    for (const auto& r : records_) {
      seen.insert(r.pair.a);
      seen.insert(r.pair.b);
    }
    nodes_.assign(seen.begin(), seen.end());
  }

  std::vector<ContactRecord> records_;
  std::vector<NodeId> nodes_;
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = (comma == std::string_view::npos)
                             ? line.substr(start)
                             : line.substr(start, comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
    fields.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline bool numeric_field(std::string_view f) {
  if (f.empty()) return false;
  for (char c : f)
    if (c < '0' || c > '9') return false;
  return true;
}

inline std::int64_t parse_nonneg(std::string_view f, std::size_t line, const char* what) {
  if (!numeric_field(f))
    throw ParseError(line, std::string(what) + ": expected non-negative integer, got '" +
                               std::string(f) + "'");
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || ptr != f.data() + f.size())
    throw ParseError(line, std::string(what) + ": bad integer '" + std::string(f) + "'");
  return v;
}

inline double parse_double(std::string_view f, std::size_t line, const char* what) {
  if (f.empty()) throw ParseError(line, std::string(what) + ": empty field");
  double v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || ptr != f.data() + f.size())
    throw ParseError(line, std::string(what) + ": bad number '" + std::string(f) + "'");
  return v;
}

}  // namespace detail

/// Reads `node_a,node_b,unix_timestamp[,duration_seconds]` lines. A single
/// leading header line is recognized by a non-numeric first field. Blank lines
/// are ignored; an empty stream yields an empty trace.
inline ContactTrace ingest_contacts(std::istream& in) {
  std::vector<ContactRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = detail::split_csv(line);
    if (lineno == 1 && !detail::numeric_field(fields[0])) continue;  // header
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError(lineno, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
    const NodeId a = detail::parse_nonneg(fields[0], lineno, "node_a");
    const NodeId b = detail::parse_nonneg(fields[1], lineno, "node_b");
    if (a == b) throw ParseError(lineno, "self contact: node " + std::to_string(a));
    const Timestamp t = detail::parse_nonneg(fields[2], lineno, "timestamp");
    std::optional<std::int64_t> dur;
    if (fields.size() == 4) dur = detail::parse_nonneg(fields[3], lineno, "duration");
    records.push_back({NodePair::of(a, b), t, dur});
  }
  return ContactTrace::from_records(std::move(records));
}

struct GeoPoint {
  NodeId node = 0;
  Timestamp timestamp = 0;
  double x = 0;  // meters
  double y = 0;
};

/// Converts geo samples to a proximity trace: two distinct nodes sampled in the
/// same t_quantum bucket at Euclidean distance <= d_min yield one contact at the
/// bucket start.
inline ContactTrace proximity_from_geo(const std::vector<GeoPoint>& points, double d_min,
                                       std::int64_t t_quantum) {
  if (!(d_min > 0)) throw std::invalid_argument("d_min must be positive");
  if (t_quantum <= 0) throw std::invalid_argument("t_quantum must be positive");
  for (const auto& p : points)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::runtime_error("non-finite coordinate for node " + std::to_string(p.node));

  std::map<std::int64_t, std::vector<const GeoPoint*>> buckets;
  for (const auto& p : points) buckets[floor_div(p.timestamp, t_quantum)].push_back(&p);

  std::vector<ContactRecord> records;
  const double d2 = d_min * d_min;
  for (const auto& [bucket, pts] : buckets) {
    std::set<NodePair> close;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (pts[i]->node == pts[j]->node) continue;
        const double dx = pts[i]->x - pts[j]->x;
        const double dy = pts[i]->y - pts[j]->y;
        if (dx * dx + dy * dy <= d2) close.insert(NodePair::of(pts[i]->node, pts[j]->node));
      }
    }
    for (const auto& pr : close) records.push_back({pr, bucket * t_quantum, std::nullopt});
  }
  return ContactTrace::from_records(std::move(records));
}

}  // namespace groupmob
