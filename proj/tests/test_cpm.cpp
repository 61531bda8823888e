#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "groupmob/cpm.hpp"
#include "oracles.hpp"

using namespace groupmob;

namespace {

ContactGraph graph_of(std::vector<std::pair<NodeId, NodeId>> edges) {
  ContactGraph g(0);
  for (auto [a, b] : edges) g.add_edge(NodePair::of(a, b), 1.0);
  return g;
}

std::vector<std::vector<NodeId>> member_sets(const std::vector<Group>& groups) {
  std::vector<std::vector<NodeId>> out;
  for (const auto& g : groups) out.push_back(g.members);
  return out;
}

}  // namespace

TEST_CASE("maximal cliques of small shapes", "[cpm]") {
  CHECK(maximal_cliques(graph_of({{1, 2}, {2, 3}, {1, 3}})) ==
        std::vector<std::vector<NodeId>>{{1, 2, 3}});
  CHECK(maximal_cliques(graph_of({{1, 2}, {2, 3}})) ==
        std::vector<std::vector<NodeId>>{{1, 2}, {2, 3}});
  CHECK(maximal_cliques(ContactGraph{}).empty());
}

TEST_CASE("maximal cliques match exhaustive enumeration", "[cpm]") {
  auto rng = substream(41, "bk-oracle");
  for (int iter = 0; iter < 60; ++iter) {
    const int n = 3 + static_cast<int>(uniform_index(rng, 8));
    const double p = 0.2 + 0.6 * uniform_real(rng);
    const auto g = testgen::random_graph(rng, n, p);
    CHECK(maximal_cliques(g) == oracle::maximal_cliques(g));
  }
}

TEST_CASE("two triangles sharing an edge percolate into one community", "[cpm]") {
  const auto g = graph_of({{1, 2}, {2, 3}, {1, 3}, {2, 4}, {3, 4}});
  const auto groups = k_clique_communities(g, 3);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].members == std::vector<NodeId>{1, 2, 3, 4});
}

TEST_CASE("two triangles sharing one node stay separate", "[cpm]") {
  const auto g = graph_of({{1, 2}, {2, 3}, {1, 3}, {3, 4}, {4, 5}, {3, 5}});
  const auto groups = k_clique_communities(g, 3);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].members == std::vector<NodeId>{1, 2, 3});
  CHECK(groups[1].members == std::vector<NodeId>{3, 4, 5});  // overlap in node 3
}

TEST_CASE("K4 is a single community of four", "[cpm]") {
  const auto g = graph_of({{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
  const auto groups = k_clique_communities(g, 3);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].members == std::vector<NodeId>{1, 2, 3, 4});
}

TEST_CASE("k=2 percolation reduces to connected components", "[cpm]") {
  const auto g = graph_of({{1, 2}, {2, 3}, {7, 8}});
  const auto groups = k_clique_communities(g, 2);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].members == std::vector<NodeId>{1, 2, 3});
  CHECK(groups[1].members == std::vector<NodeId>{7, 8});
  CHECK_THROWS_AS(k_clique_communities(g, 1), std::invalid_argument);
}

TEST_CASE("percolation matches the brute-force oracle", "[cpm]") {
  auto rng = substream(42, "cpm-oracle");
  for (int iter = 0; iter < 50; ++iter) {
    const int n = 4 + static_cast<int>(uniform_index(rng, 9));
    const double p = 0.3 + 0.3 * uniform_real(rng);
    const auto g = testgen::random_graph(rng, n, p);
    CHECK(member_sets(k_clique_communities(g, 3)) == oracle::cpm_communities(g, 3));
  }
}

TEST_CASE("every k-clique lands in exactly one group", "[cpm]") {
  auto rng = substream(43, "cpm-cover");
  for (int iter = 0; iter < 40; ++iter) {
    const auto g = testgen::random_graph(rng, 9, 0.45);
    const auto groups = k_clique_communities(g, 3);
    const auto verts = g.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        for (std::size_t l = j + 1; l < verts.size(); ++l) {
          const NodeId a = verts[i], b = verts[j], c = verts[l];
          if (!g.has_edge(NodePair::of(a, b)) || !g.has_edge(NodePair::of(a, c)) ||
              !g.has_edge(NodePair::of(b, c)))
            continue;
          int containers = 0;
          for (const auto& grp : groups) {
            const bool in = std::binary_search(grp.members.begin(), grp.members.end(), a) &&
                            std::binary_search(grp.members.begin(), grp.members.end(), b) &&
                            std::binary_search(grp.members.begin(), grp.members.end(), c);
            containers += in ? 1 : 0;
          }
          CHECK(containers >= 1);
        }
    for (const auto& grp : groups) CHECK(grp.members.size() >= 3);
  }
}

TEST_CASE("detection is equivariant under relabeling", "[cpm]") {
  auto rng = substream(44, "cpm-relabel");
  for (int iter = 0; iter < 30; ++iter) {
    const auto g = testgen::random_graph(rng, 8, 0.5);
    ContactGraph h(0);
    for (const auto& [p, w] : g.edges()) h.add_edge(NodePair::of(70 - p.a, 70 - p.b), w);
    auto mapped = member_sets(k_clique_communities(g, 3));
    for (auto& ms : mapped) {
      for (auto& m : ms) m = 70 - m;
      std::sort(ms.begin(), ms.end());
    }
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == member_sets(k_clique_communities(h, 3)));
  }
}

TEST_CASE("detect_groups thresholds each window before percolating", "[cpm]") {
  std::vector<ContactRecord> records;
  auto meet = [&](NodeId a, NodeId b, Timestamp t, int times) {
    for (int i = 0; i < times; ++i)
      records.push_back({NodePair::of(a, b), t + i * 100, std::nullopt});
  };
  // window 0: solid triangle; window 1: all edges weight 1 only
  meet(1, 2, 0, 2);
  meet(2, 3, 0, 2);
  meet(1, 3, 0, 2);
  meet(1, 2, 3600, 1);
  meet(2, 3, 3600, 1);
  meet(1, 3, 3600, 1);
  const SocialTrace social{ContactTrace::from_records(records)};
  const WindowConfig cfg{3600, 0};
  const auto groups = detect_groups(social, cfg, 2, 3);
  REQUIRE(groups.size() == 2);
  REQUIRE(groups.at(0).size() == 1);
  CHECK(groups.at(0)[0].members == std::vector<NodeId>{1, 2, 3});
  CHECK(groups.at(0)[0].id() == "g0_0");
  CHECK(groups.at(1).empty());
  CHECK_THROWS_AS(detect_groups(social, cfg, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(detect_groups(social, cfg, 0, 3), std::invalid_argument);
}

TEST_CASE("three consecutive windows match the oracle end to end", "[cpm]") {
  auto rng = substream(45, "detect-oracle");
  std::vector<ContactRecord> records;
  for (int w = 0; w < 3; ++w)
    for (int c = 0; c < 120; ++c) {
      const auto u = static_cast<NodeId>(uniform_index(rng, 9));
      auto v = static_cast<NodeId>(uniform_index(rng, 8));
      if (v >= u) ++v;
      const auto t = static_cast<Timestamp>(w * 3600 + uniform_index(rng, 3600));
      records.push_back({NodePair::of(u, v), t, std::nullopt});
    }
  const SocialTrace social{ContactTrace::from_records(records)};
  const WindowConfig cfg{3600, 0};
  const auto groups = detect_groups(social, cfg, 2, 3);
  for (int w = 0; w < 3; ++w) {
    const auto g =
        apply_weight_threshold(build_window_graph(social.trace, w, cfg), 2);
    CHECK(member_sets(groups.at(w)) == oracle::cpm_communities(g, 3));
  }
}
