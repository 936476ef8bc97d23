#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <queue>
#include <vector>

#include "scimap/pathfinder.hpp"
#include "scimap/util/rng.hpp"
#include "support.hpp"

using namespace scimap;
using testutil::make_graph;

namespace {

DistanceGraph dgraph(std::size_t n, std::vector<DistanceEdge> edges) {
  DistanceGraph g;
  g.node_count = n;
  g.edges = std::move(edges);
  g.weights.assign(g.edges.size(), 1);
  return g;
}

Distance d(std::int64_t num, std::int64_t den = 1) { return Distance{num, den}; }

// Definition check: an edge survives unless its endpoints are joined by a path of strictly
// shorter edges.
std::vector<char> by_definition(const DistanceGraph& g) {
  std::vector<char> keep(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& target = g.edges[i];
    std::vector<char> seen(g.node_count, 0);
    std::queue<std::uint32_t> q;
    q.push(target.u);
    seen[target.u] = 1;
    while (!q.empty()) {
      const auto x = q.front();
      q.pop();
      for (const auto& e : g.edges) {
        if (!(e.d < target.d)) continue;
        const std::uint32_t y = e.u == x ? e.v : (e.v == x ? e.u : UINT32_MAX);
        if (y != UINT32_MAX && !seen[y]) {
          seen[y] = 1;
          q.push(y);
        }
      }
    }
    keep[i] = !seen[target.v];
  }
  return keep;
}

CoCitationGraph random_graph(Rng& rng, std::size_t n, double density, std::int64_t max_w) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(1000 + i));
  std::vector<Edge> edges;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (uniform01(rng) < density) edges.push_back({a, b, 1 + static_cast<std::int64_t>(uniform_index(rng, max_w))});
  return make_graph(ids, edges);
}

}  // namespace

TEST(ToDistance, InverseWeights) {
  const auto g = make_graph({"A", "B", "C"}, {{0, 1, 2}, {0, 2, 1}, {1, 2, 4}});
  const auto dg = to_distance(g);
  ASSERT_EQ(dg.edges.size(), 3u);
  EXPECT_EQ(dg.edges[0].d.value(), 0.5);
  EXPECT_EQ(dg.edges[1].d.value(), 1.0);
  EXPECT_EQ(dg.edges[2].d.value(), 0.25);
  EXPECT_LT(dg.edges[0].d, dg.edges[1].d);
  EXPECT_EQ(dg.node_count, 3u);
}

TEST(ToDistance, ExactTies) {
  EXPECT_EQ(d(1, 3), d(2, 6));
  EXPECT_LT(d(1, 4), d(1, 3));
  EXPECT_GT(d(3), d(1));
}

TEST(Pfnet, TrianglePrunesWeakEdge) {
  // w(AB)=5, w(BC)=5, w(AC)=2.
  const auto g = make_graph({"A", "B", "C"}, {{0, 1, 5}, {1, 2, 5}, {0, 2, 2}});
  const auto dg = to_distance(g);
  for (const auto& pf : {pfnet_sparsify(dg), pfnet_oracle(dg)}) {
    const auto kept = pfnet_graph(g, pf);
    EXPECT_EQ(kept.edge_count(), 2u);
    EXPECT_EQ(kept.weight(0, 2), 0);
    EXPECT_EQ(kept.weight(0, 1), 5);
    EXPECT_EQ(kept.weight(1, 2), 5);
  }
}

TEST(Pfnet, EqualTriangleKeepsAll) {
  const auto g = make_graph({"A", "B", "C"}, {{0, 1, 3}, {1, 2, 3}, {0, 2, 3}});
  const auto dg = to_distance(g);
  EXPECT_EQ(pfnet_sparsify(dg).retained_count(), 3u);
  EXPECT_EQ(pfnet_oracle(dg).retained_count(), 3u);
}

TEST(Pfnet, FourCycle) {
  const auto g = dgraph(4, {{0, 1, d(1)}, {1, 2, d(1)}, {2, 3, d(1)}, {0, 3, d(3)}});
  const std::vector<char> expect{1, 1, 1, 0};
  EXPECT_EQ(pfnet_sparsify(g).retained, expect);
  EXPECT_EQ(pfnet_oracle(g).retained, expect);
  EXPECT_EQ(by_definition(g), expect);
}

TEST(Pfnet, SingleEdgeAndEmpty) {
  const auto one = dgraph(2, {{0, 1, d(7)}});
  EXPECT_EQ(pfnet_sparsify(one).retained, std::vector<char>{1});
  EXPECT_EQ(pfnet_oracle(one).retained, std::vector<char>{1});
  const auto none = dgraph(5, {});
  EXPECT_EQ(pfnet_sparsify(none).retained_count(), 0u);
  EXPECT_EQ(pfnet_sparsify(none).q, 4u);
}

TEST(Pfnet, TreeIsIdentity) {
  Rng rng = derived_rng(21, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 30);
    std::vector<DistanceEdge> edges;
    for (std::uint32_t v = 1; v < n; ++v)
      edges.push_back({static_cast<std::uint32_t>(uniform_index(rng, v)), v, d(1, 1 + uniform_index(rng, 5))});
    const auto pf = pfnet_sparsify(dgraph(n, edges));
    ASSERT_EQ(pf.retained_count(), n - 1);
  }
}

TEST(Pfnet, MatchesOracleAndDefinition) {
  Rng rng = derived_rng(22, 0);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + uniform_index(rng, 25);
    const double density = 0.05 + 0.9 * uniform01(rng);
    const std::int64_t max_w = 1 + static_cast<std::int64_t>(uniform_index(rng, 6));
    const auto g = random_graph(rng, n, density, max_w);
    const auto dg = to_distance(g);
    const auto fast = pfnet_sparsify(dg);
    ASSERT_EQ(fast.retained, pfnet_oracle(dg).retained) << "trial " << t;
    ASSERT_EQ(fast.retained, by_definition(dg)) << "trial " << t;
    ASSERT_EQ(pfnet_sparsify(g).retained, fast.retained) << "trial " << t;
  }
}

TEST(Pfnet, PreservesComponents) {
  Rng rng = derived_rng(23, 0);
  for (int t = 0; t < 100; ++t) {
    const auto g = random_graph(rng, 2 + uniform_index(rng, 40), 0.08, 4);
    const auto pf = pfnet_sparsify(to_distance(g));
    const auto kept = pfnet_graph(g, pf);
    ASSERT_EQ(component_labels(kept), component_labels(g));
    // At least a spanning forest survives.
    const auto labels = component_labels(g);
    const std::size_t comps = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    ASSERT_GE(kept.edge_count(), g.node_count() - comps);
  }
}

TEST(Pfnet, DistinctDistancesGiveUniqueMst) {
  Rng rng = derived_rng(24, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 20);
    std::vector<DistanceEdge> edges;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b) edges.push_back({a, b, d(1)});
    // Distinct distances in random order over the complete graph.
    std::shuffle(edges.begin(), edges.end(), rng);
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].d = d(static_cast<std::int64_t>(i) + 1);
    const auto pf = pfnet_sparsify(dgraph(n, edges));
    ASSERT_EQ(pf.retained_count(), n - 1);
  }
}

TEST(Pfnet, ScaleInvariant) {
  Rng rng = derived_rng(25, 0);
  for (int t = 0; t < 100; ++t) {
    const auto dg = to_distance(random_graph(rng, 2 + uniform_index(rng, 25), 0.3, 5));
    const auto base = pfnet_sparsify(dg).retained;
    const std::int64_t num = 1 + static_cast<std::int64_t>(uniform_index(rng, 1000));
    const std::int64_t den = 1 + static_cast<std::int64_t>(uniform_index(rng, 1000));
    ASSERT_EQ(pfnet_sparsify(scale_distances(dg, num, den)).retained, base);
  }
  EXPECT_THROW(scale_distances(DistanceGraph{}, 0, 1), Error);
}

TEST(Pfnet, OracleBound) {
  const auto big = dgraph(201, {});
  try {
    pfnet_oracle(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OracleTooLarge);
  }
  EXPECT_NO_THROW(pfnet_oracle(big, 300));
}

TEST(Pfnet, GraphMismatchRejected) {
  const auto g = make_graph({"A", "B"}, {{0, 1, 1}});
  PFNetwork pf;
  EXPECT_THROW(pfnet_graph(g, pf), Error);
}
