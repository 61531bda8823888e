#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupmob/graph.hpp"
#include "groupmob/recast.hpp"

namespace groupmob {

/// One community detected in one window. Ordinals follow the lexicographic
/// order of the member sets, so output is stable across runs.
struct Group {
  std::int64_t window = 0;
  int ordinal = 0;
  std::vector<NodeId> members;  // sorted

  std::string id() const {
    return "g" + std::to_string(window) + "_" + std::to_string(ordinal);
  }

  friend bool operator==(const Group&, const Group&) = default;
};

namespace detail {

inline std::vector<NodeId> intersect_sorted(const std::vector<NodeId>& a,
                                            const std::vector<NodeId>& b) {
  std::vector<NodeId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct BronKerbosch {
  const ContactGraph& g;
  std::vector<std::vector<NodeId>>& out;

  void expand(std::vector<NodeId>& r, std::vector<NodeId> p, std::vector<NodeId> x) {
    if (p.empty() && x.empty()) {
      auto clique = r;
      std::sort(clique.begin(), clique.end());
      out.push_back(std::move(clique));
      return;
    }
    // pivot: vertex of P ∪ X covering the most of P, smallest id on ties
    NodeId pivot = 0;
    std::size_t best = 0;
    bool have = false;
    for (const auto* side : {&p, &x}) {
      for (NodeId u : *side) {
        const std::size_t cov = intersect_sorted(p, g.neighbors(u)).size();
        if (!have || cov > best) {
          have = true;
          best = cov;
          pivot = u;
        }
      }
    }
    std::vector<NodeId> candidates;
    const auto& np = g.neighbors(pivot);
    std::set_difference(p.begin(), p.end(), np.begin(), np.end(),
                        std::back_inserter(candidates));
    for (NodeId v : candidates) {
      const auto& nv = g.neighbors(v);
      r.push_back(v);
      expand(r, intersect_sorted(p, nv), intersect_sorted(x, nv));
      r.pop_back();
      p.erase(std::lower_bound(p.begin(), p.end(), v));
      x.insert(std::upper_bound(x.begin(), x.end(), v), v);
    }
  }
};

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t i, std::size_t j) { parent[find(i)] = find(j); }
};

template <typename Fn>
void for_each_k_subset(const std::vector<NodeId>& items, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  std::vector<NodeId> subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = items[pick[i]];
    fn(subset);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == items.size() - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace detail

/// All maximal cliques (Bron-Kerbosch with pivoting), sorted lexicographically.
/// Isolated vertices would come out as singletons, but window graphs never
/// carry them.
inline std::vector<std::vector<NodeId>> maximal_cliques(const ContactGraph& g) {
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> p = g.vertices();
  if (p.empty()) return out;
  std::vector<NodeId> r, x;
  detail::BronKerbosch bk{g, out};
  bk.expand(r, std::move(p), std::move(x));
  std::sort(out.begin(), out.end());
  return out;
}

/// Clique percolation: k-cliques are adjacent when they share k-1 nodes; each
/// connected component's node union is one community. k-cliques are taken as
/// the k-subsets of the maximal cliques, and adjacency is found by
/// fingerprinting every (k-1)-subset instead of intersecting cliques pairwise.
inline std::vector<Group> k_clique_communities(const ContactGraph& g, int k) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  const auto uk = static_cast<std::size_t>(k);

  std::set<std::vector<NodeId>> clique_set;
  for (const auto& m : maximal_cliques(g))
    if (m.size() >= uk)
      detail::for_each_k_subset(m, uk,
                                [&](const std::vector<NodeId>& c) { clique_set.insert(c); });
  if (clique_set.empty()) return {};

  const std::vector<std::vector<NodeId>> cliques(clique_set.begin(), clique_set.end());
  detail::UnionFind uf(cliques.size());
  std::map<std::vector<NodeId>, std::size_t> fingerprints;
  std::vector<NodeId> sub(uk - 1);
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (std::size_t drop = 0; drop < uk; ++drop) {
      sub.clear();
      for (std::size_t j = 0; j < uk; ++j)
        if (j != drop) sub.push_back(cliques[i][j]);
      auto [it, inserted] = fingerprints.try_emplace(sub, i);
      if (!inserted) uf.unite(i, it->second);
    }
  }

  std::map<std::size_t, std::set<NodeId>> components;
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    auto& members = components[uf.find(i)];
    members.insert(cliques[i].begin(), cliques[i].end());
  }
  std::vector<std::vector<NodeId>> member_sets;
  member_sets.reserve(components.size());
  for (const auto& [root, members] : components)
    member_sets.emplace_back(members.begin(), members.end());
  std::sort(member_sets.begin(), member_sets.end());

  std::vector<Group> groups;
  groups.reserve(member_sets.size());
  for (std::size_t i = 0; i < member_sets.size(); ++i)
    groups.push_back({g.window(), static_cast<int>(i), std::move(member_sets[i])});
  return groups;
}

using PerWindowGroups = std::map<std::int64_t, std::vector<Group>>;

/// Runs detection on every window of the trace: build the window graph, apply
/// the weight threshold, percolate. Windows without a k-clique map to empty
/// vectors so transitions over quiet hours stay visible.
inline PerWindowGroups detect_groups(const SocialTrace& social, const WindowConfig& cfg,
                                     int w_th, int k) {
  if (k < 3) throw std::invalid_argument("k must be >= 3");
  if (w_th < 1) throw std::invalid_argument("w_th must be >= 1");
  PerWindowGroups out;
  const auto& trace = social.trace;
  if (trace.empty()) return out;
  const auto [w_lo, w_hi] = window_range(trace, cfg);
  for (std::int64_t w = w_lo; w <= w_hi; ++w) {
    const ContactGraph g =
        apply_weight_threshold(build_window_graph(trace, w, cfg, WeightMode::Count), w_th);
    out[w] = k_clique_communities(g, k);
  }
  return out;
}

}  // namespace groupmob
