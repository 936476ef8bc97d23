#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "scimap/cocitation.hpp"
#include "scimap/util/rng.hpp"
#include "support.hpp"

using namespace scimap;
using testutil::J;
using testutil::R;
using testutil::make_graph;

namespace {

using PairMap = std::map<std::pair<std::string, std::string>, std::int64_t>;

PairMap edge_map(const CoCitationGraph& g) {
  PairMap m;
  for (const auto& e : g.edges) m[{g.nodes[e.u].id, g.nodes[e.v].id}] = e.weight;
  return m;
}

void bump(PairMap& m, std::string a, std::string b) {
  if (a == b) return;
  if (b < a) std::swap(a, b);
  ++m[{a, b}];
}

// Direct enumeration from the raw fixture rows, independent of the linked corpus.
PairMap brute_force(const std::vector<R>& rows, Level level, CountMode mode) {
  std::map<std::string, std::vector<std::vector<std::string>>> per_entry;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : rows) {
    if (r.journals.empty() || !seen.insert({r.entry, r.work}).second) continue;
    std::vector<std::string> units;
    if (level == Level::work) {
      units = {r.work};
    } else {
      const std::set<std::string> distinct(r.journals.begin(), r.journals.end());
      units.assign(distinct.begin(), distinct.end());
    }
    per_entry[r.entry].push_back(units);
  }
  PairMap m;
  for (const auto& [entry, recs] : per_entry) {
    if (mode == CountMode::set) {
      std::set<std::string> all;
      for (const auto& u : recs) all.insert(u.begin(), u.end());
      for (auto a = all.begin(); a != all.end(); ++a)
        for (auto b = std::next(a); b != all.end(); ++b) bump(m, *a, *b);
    } else {
      for (std::size_t i = 0; i < recs.size(); ++i)
        for (std::size_t j = i + 1; j < recs.size(); ++j)
          for (const auto& a : recs[i])
            for (const auto& b : recs[j]) bump(m, a, b);
    }
  }
  return m;
}

std::vector<J> journals(int n) {
  std::vector<J> js;
  for (int k = 0; k < n; ++k) js.push_back({"J" + std::to_string(10 + k), {2701}});
  return js;
}

}  // namespace

TEST(Cocitation, WorkLevelExample) {
  const std::vector<R> rows{{"E1", "A", 2016, 2010, {"J10"}}, {"E1", "B", 2016, 2010, {"J10"}},
                            {"E1", "C", 2016, 2010, {"J10"}}, {"E2", "A", 2016, 2010, {"J10"}},
                            {"E2", "B", 2016, 2010, {"J10"}}};
  auto c = testutil::make_corpus(journals(1), rows);
  auto g = build_cocitation(c, Level::work);
  g.validate();
  const auto a = *g.find_node("A"), b = *g.find_node("B"), cc = *g.find_node("C");
  EXPECT_EQ(g.weight(a, b), 2);
  EXPECT_EQ(g.weight(a, cc), 1);
  EXPECT_EQ(g.weight(b, cc), 1);
  EXPECT_EQ(g.nodes[a].citations, 2);
}

TEST(Cocitation, SingleCitationHasNoEdges) {
  auto c = testutil::make_corpus(journals(1), {{"E1", "A", 2016, 2010, {"J10"}}});
  const auto g = build_cocitation(c, Level::work);
  EXPECT_EQ(g.node_count(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(Cocitation, JournalSetVersusPairSum) {
  std::vector<R> rows;
  for (int k = 0; k < 3; ++k) rows.push_back({"E1", "a" + std::to_string(k), 2016, 2010, {"J10"}});
  for (int k = 0; k < 2; ++k) rows.push_back({"E1", "b" + std::to_string(k), 2016, 2010, {"J11"}});
  auto c = testutil::make_corpus(journals(2), rows);
  const auto set = build_cocitation(c, Level::journal, {.mode = CountMode::set});
  const auto sum = build_cocitation(c, Level::journal, {.mode = CountMode::pair_sum});
  ASSERT_EQ(set.edge_count(), 1u);
  EXPECT_EQ(set.edges[0].weight, 1);
  EXPECT_EQ(sum.edges[0].weight, 6);
  EXPECT_EQ(edge_map(set), brute_force(rows, Level::journal, CountMode::set));
  EXPECT_EQ(edge_map(sum), brute_force(rows, Level::journal, CountMode::pair_sum));
  EXPECT_EQ(set.mode, CountMode::set);
  EXPECT_EQ(sum.mode, CountMode::pair_sum);
}

TEST(Cocitation, MatchesBruteForceOnRandomCorpora) {
  Rng rng = derived_rng(5, 0);
  const auto js = journals(15);
  for (int t = 0; t < 150; ++t) {
    const auto n_entries = 1 + uniform_index(rng, 30);
    const auto n_units = 2 + uniform_index(rng, 14);
    // Each work has a fixed journal list so metadata stays consistent.
    std::vector<std::vector<std::string>> work_journals(n_units);
    for (auto& wj : work_journals) {
      wj.push_back(js[uniform_index(rng, n_units)].id);
      if (uniform01(rng) < 0.15) wj.push_back(js[uniform_index(rng, n_units)].id);
    }
    std::vector<R> rows;
    for (std::size_t e = 0; e < n_entries; ++e) {
      const auto k = uniform_index(rng, 8);
      for (std::size_t i = 0; i < k; ++i) {
        const auto w = uniform_index(rng, n_units);
        rows.push_back({"E" + std::to_string(e), "W" + std::to_string(w), 2016, 2010, work_journals[w]});
      }
    }
    auto c = testutil::make_corpus(js, rows);
    for (auto level : {Level::work, Level::journal})
      for (auto mode : {CountMode::set, CountMode::pair_sum}) {
        const auto g = build_cocitation(c, level, {.mode = mode, .workers = 1 + static_cast<unsigned>(t % 3)});
        g.validate();
        ASSERT_EQ(edge_map(g), brute_force(rows, level, mode)) << "trial " << t;
        // A tiny pass budget forces one pass per unit; the result must not change.
        const auto passes = build_cocitation(c, level, {.mode = mode, .workers = 2, .pass_keys = 1 + static_cast<std::uint64_t>(t % 4)});
        ASSERT_EQ(passes.edges, g.edges) << "trial " << t;
        // Symmetry and the set-mode bound.
        std::set<std::string> entries;
        for (const auto& r : rows) entries.insert(r.entry);
        for (const auto& e : g.edges) {
          ASSERT_EQ(g.weight(e.u, e.v), g.weight(e.v, e.u));
          if (mode == CountMode::set) {
            ASSERT_LE(e.weight, static_cast<std::int64_t>(entries.size()));
          }
        }
      }
  }
}

TEST(Cocitation, FieldLevelAggregatesCodes) {
  auto c = testutil::make_corpus({{"M", {2701}}, {"A", {1101, 1102}}},
                                 {{"E1", "W1", 2016, 2010, {"M"}}, {"E1", "W2", 2016, 2010, {"A"}}});
  const auto g = build_cocitation(c, Level::field);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);  // all three codes co-cited by E1
  const auto mf = build_cocitation(c, Level::main_field);
  EXPECT_EQ(mf.node_count(), 2u);
  EXPECT_EQ(mf.edge_count(), 1u);
  EXPECT_EQ(mf.nodes[*mf.find_node("27")].label, "Medicine");
}

TEST(GiantComponent, Triangle) {
  const auto g = make_graph({"a", "b", "c"}, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
  const auto c = giant_component(g);
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{3}));
  EXPECT_EQ(c.giant.node_count(), 3u);
  EXPECT_EQ(c.giant.edge_count(), 3u);
}

TEST(GiantComponent, TrianglePlusEdge) {
  const auto g = make_graph({"a", "b", "c", "d", "e"}, {{3, 4, 7}, {0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
  const auto c = giant_component(g);
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(c.giant.node_count(), 3u);
  EXPECT_TRUE(c.giant.find_node("a").has_value());
  EXPECT_FALSE(c.giant.find_node("d").has_value());
  EXPECT_THROW(giant_component(CoCitationGraph{}), Error);
}

TEST(Filter, ThresholdOneIsIdentity) {
  const auto g = make_graph({"a", "b", "c", "z"}, {{0, 1, 3}, {1, 2, 1}});
  const auto f = filter_edges_min_weight(g, 1);
  EXPECT_EQ(f.nodes, g.nodes);
  EXPECT_EQ(f.edges, g.edges);
}

TEST(Filter, PathExample) {
  const auto g = make_graph({"A", "B", "C"}, {{0, 1, 60}, {1, 2, 40}});
  const auto f = filter_edges_min_weight(g, 50);
  ASSERT_EQ(f.node_count(), 2u);
  ASSERT_EQ(f.edge_count(), 1u);
  EXPECT_EQ(f.nodes[f.edges[0].u].id, "A");
  EXPECT_EQ(f.nodes[f.edges[0].v].id, "B");
  EXPECT_FALSE(f.find_node("C").has_value());
  EXPECT_THROW(filter_edges_min_weight(g, 0), Error);
}

TEST(Filter, NodeStrengthVariant) {
  // Strengths: A 60, B 100, C 40.
  const auto g = make_graph({"A", "B", "C"}, {{0, 1, 60}, {1, 2, 40}});
  const auto f = filter_edges_min_weight(g, 50, FilterMode::node_strength);
  EXPECT_EQ(f.edge_count(), 1u);
  EXPECT_FALSE(f.find_node("C").has_value());
}

TEST(Filter, MonotoneInThreshold) {
  Rng rng = derived_rng(9, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 20);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(100 + i));
    std::vector<Edge> edges;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b)
        if (uniform01(rng) < 0.3) edges.push_back({a, b, 1 + static_cast<std::int64_t>(uniform_index(rng, 20))});
    const auto g = make_graph(ids, edges);
    const std::int64_t t1 = 1 + static_cast<std::int64_t>(uniform_index(rng, 20));
    const std::int64_t t2 = t1 + static_cast<std::int64_t>(uniform_index(rng, 10));
    const auto f1 = edge_map(filter_edges_min_weight(g, t1));
    const auto f2 = edge_map(filter_edges_min_weight(g, t2));
    for (const auto& [k, w] : f2) {
      auto it = f1.find(k);
      ASSERT_NE(it, f1.end());
      ASSERT_EQ(it->second, w);
    }
  }
}

TEST(Shares, SingleGroup) {
  const auto g = make_graph({"a", "b", "c"}, {{0, 1, 2}, {1, 2, 5}}, {"X", "X", "X"});
  const auto s = intra_inter_shares(g, area_groups(g));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.at("X").intra, 1.0);
  EXPECT_EQ(s.at("X").inter, 0.0);
}

TEST(Shares, TwoGroupsOneBridge) {
  const auto g = make_graph({"a", "b"}, {{0, 1, 4}}, {"X", "Y"});
  const auto s = intra_inter_shares(g, area_groups(g));
  for (const auto& name : {"X", "Y"}) {
    EXPECT_EQ(s.at(name).intra, 0.0);
    EXPECT_EQ(s.at(name).inter, 1.0);
  }
}

TEST(Shares, SumToOneAndHandCount) {
  // X: a-b intra 3 counted at both ends (6), a-c inter 1 -> 6/7.
  const auto g = make_graph({"a", "b", "c"}, {{0, 1, 3}, {0, 2, 1}}, {"X", "X", "Y"});
  const auto s = intra_inter_shares(g, area_groups(g));
  EXPECT_DOUBLE_EQ(s.at("X").intra, 6.0 / 7.0);
  EXPECT_EQ(s.at("Y").inter, 1.0);
  for (const auto& [k, v] : s) EXPECT_NEAR(v.intra + v.inter, 1.0, 1e-12);
}

TEST(Shares, MissingGroupIsError) {
  const auto g = make_graph({"a", "b"}, {{0, 1, 4}});
  try {
    intra_inter_shares(g, area_groups(g));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GroupMissing);
  }
}

TEST(Totals, CountsCocitedNodes) {
  const auto g = make_graph({"a", "b", "c"}, {{0, 1, 3}});
  const auto t = cocitation_totals(g);
  EXPECT_EQ(t.nodes, 3u);
  EXPECT_EQ(t.cocited_nodes, 2u);
  EXPECT_EQ(t.edges, 1u);
  EXPECT_EQ(t.total_weight, 3);
}
