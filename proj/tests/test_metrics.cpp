#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "groupmob/metrics.hpp"

using namespace groupmob;

namespace {

ContactGraph graph_of(std::vector<std::tuple<NodeId, NodeId, double>> edges) {
  ContactGraph g(0);
  for (auto [a, b, w] : edges) g.add_edge(NodePair::of(a, b), w);
  return g;
}

}  // namespace

TEST_CASE("gscf on canonical shapes", "[metrics]") {
  const auto isolated = graph_of({{1, 2, 1}, {2, 3, 1}, {1, 3, 1}});
  CHECK(gscf(isolated, {1, 2, 3}) == 1.0);

  const auto split = graph_of({{1, 2, 5}, {2, 9, 5}});
  CHECK(gscf(split, {1, 2}) == 0.5);

  const auto external = graph_of({{1, 8, 2}, {2, 9, 3}});
  CHECK(gscf(external, {1, 2}) == 0.0);

  CHECK_THROWS_AS(gscf(isolated, {}), std::invalid_argument);
  CHECK_THROWS_AS(gscf(isolated, {1, 99}), std::invalid_argument);
}

TEST_CASE("gscf moves monotonically with internal and external edges", "[metrics]") {
  auto rng = substream(61, "gscf-mono");
  for (int iter = 0; iter < 1000; ++iter) {
    auto g = testgen::random_graph(rng, 8, 0.5);
    std::vector<NodeId> members;
    for (NodeId n : g.vertices())
      if (uniform_real(rng) < 0.5) members.push_back(n);
    if (members.size() < 2 || members.size() == g.vertex_count()) continue;
    const double base = gscf(g, members);

    auto internal = g;
    const auto mi = static_cast<std::size_t>(uniform_index(rng, members.size()));
    auto mj = static_cast<std::size_t>(uniform_index(rng, members.size() - 1));
    if (mj >= mi) ++mj;
    internal.add_edge(NodePair::of(members[mi], members[mj]), 1.0);
    CHECK(gscf(internal, members) >= base);

    auto external = g;
    std::vector<NodeId> outside;
    for (NodeId n : external.vertices())
      if (!std::binary_search(members.begin(), members.end(), n)) outside.push_back(n);
    const NodeId out = outside[static_cast<std::size_t>(uniform_index(rng, outside.size()))];
    external.add_edge(NodePair::of(members[mi], out), 1.0);
    CHECK(gscf(external, members) <= base);
  }
}

TEST_CASE("sizes by hour pool all windows at the hour", "[metrics]") {
  PerWindowGroups groups;
  groups[3] = {{3, 0, {1, 2, 3, 4, 5, 6}}};
  groups[7] = {{7, 0, {1, 2, 3}}, {7, 1, {4, 5, 6, 7}}};
  groups[31] = {{31, 0, {1, 2, 3, 4, 5}}};  // hour 7 again, next day
  const WindowConfig cfg{3600, 0};
  const auto stats = sizes_by_hour(groups, cfg);
  CHECK(stats[3].count == 1);
  CHECK(stats[3].min == 6.0);
  CHECK(stats[3].max == 6.0);
  CHECK(stats[3].mean == 6.0);
  CHECK(stats[3].median == 6.0);
  CHECK(stats[7].count == 3);  // sizes {3,4,5}
  CHECK(stats[7].median == 4.0);
  CHECK(stats[7].q1 == 3.5);
  CHECK(stats[7].q3 == 4.5);
  CHECK(stats[0].count == 0);  // empty marker
}

TEST_CASE("re-meeting histogram normalizes pooled gaps", "[metrics]") {
  GroupHistory h1;
  h1.gaps_start_to_start = {24, 24};
  GroupHistory h2;
  h2.gaps_start_to_start = {48};
  const auto hist = remeeting_histogram({h1, h2}, 336);
  CHECK(hist.mass.at(24) == Catch::Approx(2.0 / 3.0));
  CHECK(hist.mass.at(48) == Catch::Approx(1.0 / 3.0));

  GroupHistory only24;
  only24.gaps_start_to_start = {24, 24, 24};
  const auto all24 = remeeting_histogram({only24}, 336);
  CHECK(all24.mass.at(24) == 1.0);

  CHECK_THROWS_WITH(remeeting_histogram({}, 336), "no gaps");
  GroupHistory beyond;
  beyond.gaps_start_to_start = {400};
  CHECK_THROWS_WITH(remeeting_histogram({beyond}, 336), "no gaps");
}

TEST_CASE("periodicity score sums the mass near period multiples", "[metrics]") {
  PeriodicityHistogram h;
  h.horizon_hours = 336;
  h.mass = {{24, 0.5}, {48, 0.25}, {72, 0.25}};
  CHECK(periodicity_score(h, 24, 1) == 1.0);

  PeriodicityHistogram off;
  off.horizon_hours = 336;
  off.mass = {{13, 1.0}};
  CHECK(periodicity_score(off, 24, 2) == 0.0);

  // uniform over [1, 336]: exactly the covered-bin fraction
  PeriodicityHistogram uniform;
  uniform.horizon_hours = 336;
  for (std::int64_t b = 1; b <= 336; ++b) uniform.mass[b] = 1.0 / 336.0;
  std::int64_t covered = 0;
  for (std::int64_t b = 1; b <= 336; ++b) {
    for (std::int64_t m = 1; m * 24 <= 336 + 1; ++m)
      if (std::llabs(b - m * 24) <= 1) {
        ++covered;
        break;
      }
  }
  CHECK(covered == 41);
  CHECK(periodicity_score(uniform, 24, 1) ==
        Catch::Approx(static_cast<double>(covered) / 336.0));
  CHECK(periodicity_uniform_baseline(24, 1, 336) ==
        Catch::Approx(static_cast<double>(covered) / 336.0));

  CHECK_THROWS_AS(periodicity_score(h, 24, 12), std::invalid_argument);
}

TEST_CASE("periodicity score grows with tolerance", "[metrics]") {
  auto rng = substream(62, "period-mono");
  for (int iter = 0; iter < 200; ++iter) {
    PeriodicityHistogram h;
    h.horizon_hours = 100;
    double total = 0;
    for (int i = 0; i < 20; ++i) {
      const auto b = static_cast<std::int64_t>(1 + uniform_index(rng, 100));
      h.mass[b] += 0.05;
      total += 0.05;
    }
    const auto tol = static_cast<std::int64_t>(uniform_index(rng, 5));
    CHECK(periodicity_score(h, 24, tol) <= periodicity_score(h, 24, tol + 1) + 1e-12);
  }
}

TEST_CASE("pearson on exact cases", "[metrics]") {
  CHECK(pearson({1, 2, 3, 4}, {3, 5, 7, 9}) == Catch::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {-1, -2, -3}) == Catch::Approx(-1.0));
  CHECK(pearson({1, 2, 3}, {1, 3, 2}) == Catch::Approx(0.5));
  CHECK_THROWS_WITH(pearson({1, 1, 1}, {1, 2, 3}), "undefined correlation");
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2}), std::invalid_argument);
}

TEST_CASE("pearson symmetry and affine invariance", "[metrics]") {
  auto rng = substream(63, "pearson-props");
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<double> xs, ys;
    for (int i = 0; i < 8; ++i) {
      xs.push_back(uniform_real(rng) * 10);
      ys.push_back(uniform_real(rng) * 10);
    }
    double r;
    try {
      r = pearson(xs, ys);
    } catch (const std::runtime_error&) {
      continue;
    }
    CHECK(pearson(ys, xs) == Catch::Approx(r));
    std::vector<double> scaled;
    for (double x : xs) scaled.push_back(2.5 * x + 7.0);
    CHECK(pearson(scaled, ys) == Catch::Approx(r));
    CHECK(pearson(xs, xs) == Catch::Approx(1.0));
  }
}

TEST_CASE("duration correlations recover a planted monotone relation", "[metrics]") {
  auto rng = substream(64, "corr-planted");
  std::vector<GroupMetricsRecord> records;
  for (int i = 0; i < 40; ++i) {
    GroupMetricsRecord r;
    r.timeline_id = i;
    r.duration_hours = 2 + static_cast<double>(uniform_index(rng, 10));
    r.mean_gscf = 0.05 * r.duration_hours + 0.1 * uniform_real(rng);
    r.mean_rho = 0.5 + 0.04 * r.duration_hours + 0.05 * uniform_real(rng);
    records.push_back(r);
  }
  const auto rep = duration_correlations(records, 2000, 5);
  CHECK(rep.n == 40);
  CHECK(rep.r_duration_gscf > 0.3);
  CHECK(rep.r_duration_rho > 0.3);
  CHECK(rep.p_duration_gscf < 0.05);
  CHECK(rep.p_duration_rho < 0.05);
}

TEST_CASE("degenerate correlation inputs error out", "[metrics]") {
  std::vector<GroupMetricsRecord> constant;
  for (int i = 0; i < 10; ++i) {
    GroupMetricsRecord r;
    r.duration_hours = 4;
    r.mean_rho = 0.6 + 0.01 * i;
    r.mean_gscf = 0.5;
    constant.push_back(r);
  }
  CHECK_THROWS_WITH(duration_correlations(constant, 100, 1), "undefined correlation");

  std::vector<GroupMetricsRecord> few(2);
  few[0].mean_rho = 0.6;
  few[1].mean_rho = 0.7;
  CHECK_THROWS_WITH(duration_correlations(few, 100, 1), "fewer than 3 eligible records");
}

TEST_CASE("meeting metrics average gscf and rho over the meeting", "[metrics]") {
  // group {1,2,3} solid for two windows with one external edge in window 0
  std::vector<ContactRecord> records;
  auto meet = [&](NodeId a, NodeId b, Timestamp t, int times) {
    for (int i = 0; i < times; ++i)
      records.push_back({NodePair::of(a, b), t + i * 10, std::nullopt});
  };
  meet(1, 2, 0, 2);
  meet(2, 3, 0, 2);
  meet(1, 3, 0, 2);
  meet(3, 9, 0, 2);
  meet(9, 8, 0, 2);
  meet(1, 2, 3600, 2);
  meet(2, 3, 3600, 2);
  meet(1, 3, 3600, 2);
  const ContactTrace trace = ContactTrace::from_records(records);
  const WindowConfig cfg{3600, 0};
  GroupTimeline tl;
  tl.timeline_id = 0;
  tl.first_window = 0;
  tl.member_sets = {{1, 2, 3}, {1, 2, 3}};
  tl.rho_steps = {1.0};
  const auto recs = meeting_metrics({tl}, trace, cfg, 2);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].duration_hours == 2.0);
  // window 0: w_in 6, w_out 2 -> 0.75; window 1: isolated -> 1.0
  CHECK(recs[0].mean_gscf == Catch::Approx((0.75 + 1.0) / 2));
  CHECK(recs[0].mean_rho == Catch::Approx(1.0));
}
