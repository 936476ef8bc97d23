#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scimap/error.hpp"
#include "scimap/util/union_find.hpp"

namespace scimap {

enum class Level { work, journal, field, main_field, area };
enum class CountMode { set, pair_sum };

constexpr std::string_view to_string(Level l) {
  switch (l) {
    case Level::work: return "work";
    case Level::journal: return "journal";
    case Level::field: return "field";
    case Level::main_field: return "main_field";
    case Level::area: return "area";
  }
  return "?";
}

constexpr std::string_view to_string(CountMode m) { return m == CountMode::set ? "set" : "pair_sum"; }

inline std::optional<Level> parse_level(std::string_view s) {
  for (auto l : {Level::work, Level::journal, Level::field, Level::main_field, Level::area})
    if (s == to_string(l)) return l;
  return std::nullopt;
}

inline std::optional<CountMode> parse_mode(std::string_view s) {
  if (s == "set") return CountMode::set;
  if (s == "pair_sum") return CountMode::pair_sum;
  return std::nullopt;
}

struct Node {
  std::string id;
  std::string label;
  std::int64_t citations = 0;
  std::string area_label;
  std::vector<std::string> areas;  // components of area_label
  std::optional<bool> open_access;

  bool operator==(const Node&) const = default;
};

/// Undirected edge in canonical orientation (u < v).
struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  std::int64_t weight = 0;

  bool operator==(const Edge&) const = default;
};

inline bool canonical_less(const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; }

struct Neighbor {
  std::uint32_t node;
  std::uint32_t edge;  // index into CoCitationGraph::edges
};

/// Compressed sparse adjacency with neighbour lists sorted by node index.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<Neighbor> entries;

  std::span<const Neighbor> of(std::uint32_t n) const {
    return {entries.data() + offsets[n], entries.data() + offsets[n + 1]};
  }
  std::size_t degree(std::uint32_t n) const { return offsets[n + 1] - offsets[n]; }
};

/// Undirected, integer-weighted graph. Nodes are ordered by id, edges by canonical pair.
struct CoCitationGraph {
  Level level = Level::journal;
  CountMode mode = CountMode::set;
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
  bool empty() const { return nodes.empty(); }

  /// Weight of {a, b} in either order; 0 when absent.
  std::int64_t weight(std::uint32_t a, std::uint32_t b) const {
    if (a > b) std::swap(a, b);
    Edge key{a, b, 0};
    auto it = std::lower_bound(edges.begin(), edges.end(), key, canonical_less);
    return (it != edges.end() && it->u == a && it->v == b) ? it->weight : 0;
  }

  std::optional<std::uint32_t> find_node(std::string_view id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const Node& n, std::string_view k) { return n.id < k; });
    if (it == nodes.end() || it->id != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes.begin());
  }

  Adjacency adjacency() const {
    Adjacency adj;
    adj.offsets.assign(nodes.size() + 1, 0);
    for (const auto& e : edges) {
      ++adj.offsets[e.u + 1];
      ++adj.offsets[e.v + 1];
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) adj.offsets[i + 1] += adj.offsets[i];
    adj.entries.resize(adj.offsets.back());
    std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    // Edges are sorted by (u, v), so appending in edge order keeps each list sorted.
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      adj.entries[fill[e.u]++] = {e.v, i};
    }
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      adj.entries[fill[e.v]++] = {e.u, i};
    }
    for (std::size_t n = 0; n < nodes.size(); ++n)
      std::sort(adj.entries.begin() + static_cast<std::ptrdiff_t>(adj.offsets[n]),
                adj.entries.begin() + static_cast<std::ptrdiff_t>(adj.offsets[n + 1]),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    return adj;
  }

  /// Throws InvariantViolation on self-loops, non-positive weights, bad indices or unsorted edges.
  void validate() const {
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (!(nodes[i - 1].id < nodes[i].id))
        throw Error(ErrorKind::InvariantViolation, "node ids not strictly increasing at " + nodes[i].id);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      if (e.u >= e.v) throw Error(ErrorKind::InvariantViolation, "edge not canonical or self-loop");
      if (e.v >= nodes.size()) throw Error(ErrorKind::InvariantViolation, "edge endpoint out of range");
      if (e.weight < 1) throw Error(ErrorKind::InvariantViolation, "edge weight below 1");
      if (i && !canonical_less(edges[i - 1], e))
        throw Error(ErrorKind::InvariantViolation, "edges not strictly sorted");
    }
  }

  /// Same node set, only the edges whose mask entry is set.
  CoCitationGraph with_edges(std::span<const char> keep) const {
    CoCitationGraph g;
    g.level = level;
    g.mode = mode;
    g.nodes = nodes;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (keep[i]) g.edges.push_back(edges[i]);
    return g;
  }

  /// Induced subgraph on the nodes whose mask entry is set; indices are compacted.
  CoCitationGraph induced(std::span<const char> keep_node) const {
    CoCitationGraph g;
    g.level = level;
    g.mode = mode;
    std::vector<std::uint32_t> remap(nodes.size(), UINT32_MAX);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (keep_node[i]) {
        remap[i] = static_cast<std::uint32_t>(g.nodes.size());
        g.nodes.push_back(nodes[i]);
      }
    for (const auto& e : edges)
      if (keep_node[e.u] && keep_node[e.v]) g.edges.push_back({remap[e.u], remap[e.v], e.weight});
    return g;
  }
};

/// Component id per node; components are numbered in order of their smallest node index.
inline std::vector<std::uint32_t> component_labels(const CoCitationGraph& g) {
  UnionFind uf(g.node_count());
  for (const auto& e : g.edges) uf.unite(e.u, e.v);
  std::vector<std::uint32_t> root_label(g.node_count(), UINT32_MAX);
  std::vector<std::uint32_t> label(g.node_count());
  std::uint32_t next = 0;
  for (std::uint32_t n = 0; n < g.node_count(); ++n) {
    auto r = uf.find(n);
    if (root_label[r] == UINT32_MAX) root_label[r] = next++;
    label[n] = root_label[r];
  }
  return label;
}

/// Sum of incident edge weights per node; isolated nodes report 0.
inline std::vector<std::int64_t> weighted_degree(const CoCitationGraph& g) {
  std::vector<std::int64_t> d(g.node_count(), 0);
  for (const auto& e : g.edges) {
    d[e.u] += e.weight;
    d[e.v] += e.weight;
  }
  return d;
}

}  // namespace scimap
