#pragma once

// Pathfinder network scaling at r = infinity, q = n - 1.
//
// With r = infinity a path's length is its largest edge distance, and q = n - 1 admits every
// path. An edge survives iff no alternative path has a strictly smaller maximum edge, which is
// the union of all minimum spanning trees of each component.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "scimap/error.hpp"
#include "scimap/graph.hpp"
#include "scimap/util/union_find.hpp"

namespace scimap {

/// Positive rational distance num/den. Comparisons are exact.
struct Distance {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend std::strong_ordering operator<=>(const Distance& a, const Distance& b) {
    const __int128 l = static_cast<__int128>(a.num) * b.den;
    const __int128 r = static_cast<__int128>(b.num) * a.den;
    return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend bool operator==(const Distance& a, const Distance& b) { return (a <=> b) == 0; }
};

struct DistanceEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  Distance d;
};

/// Edge-aligned view of a co-citation graph under d = 1 / w.
struct DistanceGraph {
  std::size_t node_count = 0;
  std::vector<DistanceEdge> edges;    // same order as the source graph's edges
  std::vector<std::int64_t> weights;  // source weights, for reporting
};

inline DistanceGraph to_distance(const CoCitationGraph& g) {
  DistanceGraph d;
  d.node_count = g.node_count();
  d.edges.reserve(g.edge_count());
  for (const auto& e : g.edges) {
    if (e.weight < 1) throw Error(ErrorKind::InvalidArgument, "co-citation weights must be >= 1");
    d.edges.push_back({e.u, e.v, Distance{1, e.weight}});
    d.weights.push_back(e.weight);
  }
  return d;
}

/// Every distance multiplied by num/den.
inline DistanceGraph scale_distances(DistanceGraph g, std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  for (auto& e : g.edges) e.d = Distance{e.d.num * num, e.d.den * den};
  return g;
}

struct PFNetwork {
  std::vector<char> retained;  // one flag per source edge
  double r = std::numeric_limits<double>::infinity();
  std::size_t q = 0;

  std::size_t retained_count() const {
    return static_cast<std::size_t>(std::count(retained.begin(), retained.end(), 1));
  }
};

/// Edges processed in ascending distance tiers over a union-find; an edge is kept iff its
/// endpoints are still apart before its tier is merged. O(E log E).
inline PFNetwork pfnet_sparsify(const DistanceGraph& g) {
  PFNetwork pf;
  pf.q = g.node_count ? g.node_count - 1 : 0;
  pf.retained.assign(g.edges.size(), 0);
  std::vector<std::uint32_t> order(g.edges.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    auto c = g.edges[a].d <=> g.edges[b].d;
    return c != 0 ? c < 0 : a < b;
  });
  UnionFind uf(g.node_count);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && g.edges[order[j]].d == g.edges[order[i]].d) ++j;
    for (std::size_t k = i; k < j; ++k) {
      const auto& e = g.edges[order[k]];
      if (e.u == e.v) throw Error(ErrorKind::InvalidArgument, "self-loop in distance graph");
      pf.retained[order[k]] = !uf.same(e.u, e.v);
    }
    for (std::size_t k = i; k < j; ++k) uf.unite(g.edges[order[k]].u, g.edges[order[k]].v);
    i = j;
  }
  return pf;
}

/// Same result for d = 1 / w read straight from the co-citation weights: ascending distance is
/// descending weight and equal weights tie. Avoids materializing a DistanceGraph.
inline PFNetwork pfnet_sparsify(const CoCitationGraph& g) {
  PFNetwork pf;
  pf.q = g.node_count() ? g.node_count() - 1 : 0;
  pf.retained.assign(g.edges.size(), 0);
  std::vector<std::uint32_t> order(g.edges.size());
  std::iota(order.begin(), order.end(), 0u);
  for (const auto& e : g.edges) {
    if (e.weight < 1) throw Error(ErrorKind::InvalidArgument, "co-citation weights must be >= 1");
    if (e.u == e.v) throw Error(ErrorKind::InvalidArgument, "self-loop in co-citation graph");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return g.edges[a].weight > g.edges[b].weight; });
  UnionFind uf(g.node_count());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && g.edges[order[j]].weight == g.edges[order[i]].weight) ++j;
    for (std::size_t k = i; k < j; ++k) pf.retained[order[k]] = !uf.same(g.edges[order[k]].u, g.edges[order[k]].v);
    for (std::size_t k = i; k < j; ++k) uf.unite(g.edges[order[k]].u, g.edges[order[k]].v);
    i = j;
  }
  return pf;
}

inline constexpr std::size_t kDefaultOracleBound = 200;

/// Definitional PFNET: all-pairs minimax path distances by an O(n^3) closure, keeping an edge
/// iff no path beats its own distance.
inline PFNetwork pfnet_oracle(const DistanceGraph& g, std::size_t bound = kDefaultOracleBound) {
  const std::size_t n = g.node_count;
  if (n > bound)
    throw Error(ErrorKind::OracleTooLarge, std::to_string(n) + " nodes exceeds the oracle bound " + std::to_string(bound));
  std::vector<Distance> m(n * n);
  std::vector<char> reach(n * n, 0);
  for (const auto& e : g.edges) {
    for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      auto idx = a * n + b;
      if (!reach[idx] || e.d < m[idx]) m[idx] = e.d;
      reach[idx] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!reach[k * n + j] || i == j) continue;
        const Distance& cand = std::max(m[i * n + k], m[k * n + j]);
        auto& cur = m[i * n + j];
        if (!reach[i * n + j] || cand < cur) {
          cur = cand;
          reach[i * n + j] = 1;
        }
      }
    }
  PFNetwork pf;
  pf.q = n ? n - 1 : 0;
  pf.retained.resize(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    pf.retained[i] = e.d <= m[e.u * n + e.v];
  }
  return pf;
}

/// The source graph restricted to the retained edges; all nodes are kept.
inline CoCitationGraph pfnet_graph(const CoCitationGraph& source, const PFNetwork& pf) {
  if (pf.retained.size() != source.edge_count())
    throw Error(ErrorKind::InvalidArgument, "PFNET does not belong to this graph");
  return source.with_edges(pf.retained);
}

}  // namespace scimap
