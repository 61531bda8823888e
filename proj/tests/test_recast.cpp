#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "groupmob/recast.hpp"
#include "oracles.hpp"

using namespace groupmob;

namespace {

ContactTrace trace_of(std::vector<std::tuple<NodeId, NodeId, Timestamp>> triples) {
  std::vector<ContactRecord> records;
  for (auto [a, b, t] : triples) records.push_back({NodePair::of(a, b), t, std::nullopt});
  return ContactTrace::from_records(std::move(records));
}

constexpr Timestamp kDay = 86400;

}  // namespace

TEST_CASE("persistence counts active periods over spanned periods", "[recast]") {
  // pair (1,2) on days 0,4,7 of a 10-day trace pinned by pair (3,4)
  std::vector<std::tuple<NodeId, NodeId, Timestamp>> triples{
      {3, 4, 100}, {3, 4, 9 * kDay + 100},
      {1, 2, 200}, {1, 2, 4 * kDay + 50}, {1, 2, 4 * kDay + 90}, {1, 2, 7 * kDay}};
  const auto trace = trace_of(triples);
  CHECK(edge_persistence(trace, NodePair{1, 2}, kDay) == Catch::Approx(0.3));
  CHECK(edge_persistence(trace, NodePair{3, 4}, kDay) == Catch::Approx(0.2));
  CHECK(edge_persistence(trace, NodePair{5, 6}, kDay) == 0.0);  // absent pair
}

TEST_CASE("persistence is 1 for an always-present pair", "[recast]") {
  std::vector<std::tuple<NodeId, NodeId, Timestamp>> triples;
  for (int d = 0; d < 10; ++d) triples.push_back({1, 2, d * kDay + 500});
  CHECK(edge_persistence(trace_of(triples), NodePair{1, 2}, kDay) == 1.0);
  CHECK_THROWS_AS(edge_persistence(ContactTrace{}, NodePair{1, 2}, kDay), std::runtime_error);
}

TEST_CASE("topological overlap on canonical shapes", "[recast]") {
  ContactGraph tri(-1);
  tri.add_edge({1, 2}, 1);
  tri.add_edge({2, 3}, 1);
  tri.add_edge({1, 3}, 1);
  CHECK(topological_overlap(tri, 1, 2) == 1.0);

  ContactGraph path(-1);
  path.add_edge({1, 2}, 1);
  path.add_edge({2, 3}, 1);
  CHECK(topological_overlap(path, 1, 2) == 0.0);  // only third-party neighbor 3, not shared

  ContactGraph star(-1);
  star.add_edge({0, 1}, 1);
  star.add_edge({0, 2}, 1);
  star.add_edge({0, 3}, 1);
  CHECK(topological_overlap(star, 0, 1) == 0.0);

  CHECK_THROWS_AS(topological_overlap(star, 1, 2), std::invalid_argument);
}

TEST_CASE("classification follows the threshold table", "[recast]") {
  const Thresholds th{0.5, 0.5};
  std::vector<EdgeFeatures> f{{NodePair{1, 2}, 0.9, 0.9},
                              {NodePair{1, 3}, 0.0, 0.0},
                              {NodePair{1, 4}, 0.9, 0.1},
                              {NodePair{1, 5}, 0.1, 0.9}};
  const auto cls = classify_edges(f, th);
  CHECK(cls[0].cls == EdgeClass::Friend);
  CHECK(cls[1].cls == EdgeClass::Random);
  CHECK(cls[2].cls == EdgeClass::Bridge);
  CHECK(cls[3].cls == EdgeClass::Acquaintance);
}

TEST_CASE("raising thresholds only grows the random set", "[recast]") {
  auto rng = substream(31, "recast-mono");
  for (int iter = 0; iter < 1000; ++iter) {
    EdgeFeatures f{NodePair{1, 2}, uniform_real(rng), uniform_real(rng)};
    Thresholds lo{uniform_real(rng), uniform_real(rng)};
    Thresholds hi{lo.t_per + uniform_real(rng) * (1 - lo.t_per),
                  lo.t_to + uniform_real(rng) * (1 - lo.t_to)};
    const auto c_lo = classify_edges({f}, lo)[0].cls;
    const auto c_hi = classify_edges({f}, hi)[0].cls;
    if (c_lo == EdgeClass::Random) CHECK(c_hi == EdgeClass::Random);
  }
}

TEST_CASE("null model percentile 1.0 returns the observed maximum", "[recast]") {
  auto rng = substream(32, "null-max");
  const auto trace = testgen::random_trace(rng, 6, 120, 10 * kDay);
  const auto th_max = null_model_thresholds(trace, 10, 1.0, 7, kDay);
  const auto th_95 = null_model_thresholds(trace, 10, 0.95, 7, kDay);
  CHECK(th_95.t_per <= th_max.t_per);
  CHECK(th_95.t_to <= th_max.t_to);
  CHECK(th_max.t_per <= 1.0);
  CHECK(th_max.t_to <= 1.0);
}

TEST_CASE("single-pair trace pins the null persistence", "[recast]") {
  // 2 nodes: the only possible pair is the real one; any shuffle re-selects it
  const auto trace = trace_of({{1, 2, 100}, {1, 2, kDay + 100}, {1, 2, 2 * kDay}});
  const auto th = null_model_thresholds(trace, 20, 1.0, 3, kDay);
  CHECK(th.t_per == Catch::Approx(1.0));
  CHECK(th.t_to == 0.0);  // no third nodes, overlap denominator empty
}

TEST_CASE("null model matches an independent re-implementation", "[recast]") {
  auto rng = substream(33, "null-oracle");
  for (std::uint64_t seed : {1ull, 9ull, 77ull}) {
    const auto trace = testgen::random_trace(rng, 5, 200, 20 * kDay - 1);
    const auto mine = null_model_thresholds(trace, 100, 0.95, seed, kDay);
    const auto ref = oracle::null_model(trace, 100, 0.95, seed, kDay);
    CHECK(mine.t_per == ref.t_per);
    CHECK(mine.t_to == ref.t_to);
  }
}

TEST_CASE("strip keeps exactly the non-random pairs in order", "[recast]") {
  const auto trace = trace_of({{1, 2, 10}, {3, 4, 20}, {1, 2, 30}, {5, 6, 40}, {3, 4, 50}});
  std::vector<EdgeClassification> classes{
      {NodePair{1, 2}, EdgeClass::Friend, {}},
      {NodePair{3, 4}, EdgeClass::Random, {}},
      {NodePair{5, 6}, EdgeClass::Acquaintance, {}},
  };
  const auto social = strip_random_contacts(trace, classes);
  REQUIRE(social.trace.records().size() == 3);
  // filter oracle: linear scan
  std::vector<ContactRecord> expected;
  for (const auto& r : trace.records())
    if (!(r.pair == NodePair{3, 4})) expected.push_back(r);
  CHECK(social.trace.records() == expected);
  // idempotent
  CHECK(strip_random_contacts(social.trace, classes).trace.records() == expected);
}

TEST_CASE("strip is identity for all-friend, empty for all-random", "[recast]") {
  const auto trace = trace_of({{1, 2, 10}, {1, 2, 20}});
  std::vector<EdgeClassification> fr{{NodePair{1, 2}, EdgeClass::Friend, {}}};
  CHECK(strip_random_contacts(trace, fr).trace.records() == trace.records());
  std::vector<EdgeClassification> rd{{NodePair{1, 2}, EdgeClass::Random, {}}};
  CHECK(strip_random_contacts(trace, rd).trace.records().empty());
  CHECK_THROWS_AS(strip_random_contacts(trace, {}), std::runtime_error);
}

TEST_CASE("features are invariant under relabeling and translation", "[recast]") {
  auto rng = substream(34, "recast-invariance");
  for (int iter = 0; iter < 20; ++iter) {
    const auto trace = testgen::random_trace(rng, 6, 100, 12 * kDay);
    const auto base = edge_features(trace, kDay);
    std::vector<ContactRecord> mapped;
    for (const auto& r : trace.records())
      mapped.push_back({NodePair::of(90 - r.pair.a, 90 - r.pair.b),
                        r.timestamp + 5 * kDay + 12345, r.duration});
    const auto moved = edge_features(ContactTrace::from_records(mapped), kDay);
    REQUIRE(base.size() == moved.size());
    for (const auto& f : base) {
      const NodePair image = NodePair::of(90 - f.pair.a, 90 - f.pair.b);
      const auto it = std::find_if(moved.begin(), moved.end(),
                                   [&](const EdgeFeatures& g) { return g.pair == image; });
      REQUIRE(it != moved.end());
      CHECK(it->persistence == Catch::Approx(f.persistence));
      CHECK(it->overlap == Catch::Approx(f.overlap));
    }
  }
}
