#pragma once

// Co-citation graphs at work, journal, field, main-field or area level.
//
// set mode:      each citing entry adds 1 to every unordered pair of distinct units it cites.
// pair_sum mode: each pair of distinct works co-cited by an entry adds 1 to every pair of
//                distinct units those two works map to, so aggregated weights are sums of
//                work-level co-citations.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "scimap/corpus.hpp"
#include "scimap/graph.hpp"
#include "scimap/util/parallel.hpp"

namespace scimap {

/// Units of aggregation resolved for one corpus: node table plus units of each record.
struct UnitAssignment {
  std::vector<Node> nodes;
  std::vector<std::vector<std::uint32_t>> record_units;  // sorted, unique per record
};

namespace detail {

inline std::optional<bool> merge_open_access(std::optional<bool> acc, bool oa, bool first) {
  if (first) return oa;
  if (acc && *acc != oa) return std::nullopt;
  return acc;
}

}  // namespace detail

inline UnitAssignment assign_units(const LinkedCorpus& corpus, Level level) {
  const auto& scheme = *corpus.scheme;
  UnitAssignment out;
  out.record_units.resize(corpus.records.size());

  // Keys of each record at the chosen level; node ids are the sorted distinct keys.
  std::vector<std::vector<std::string>> keys(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    auto& k = keys[i];
    switch (level) {
      case Level::work: k.push_back(r.ref.cited_work_id); break;
      case Level::journal:
        for (auto j : r.journals) k.push_back(corpus.journals[j].record.journal_id);
        break;
      case Level::field:
        for (auto j : r.journals)
          for (int code : corpus.journals[j].fields) k.push_back(std::to_string(code));
        break;
      case Level::main_field:
        for (auto j : r.journals)
          for (int code : corpus.journals[j].fields) k.push_back(std::to_string(code / 100));
        break;
      case Level::area:
        for (auto j : r.journals) k.push_back(corpus.journals[j].area_label);
        break;
    }
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
  }

  std::map<std::string, std::uint32_t> index;
  for (const auto& k : keys)
    for (const auto& key : k) index.emplace(key, 0);
  out.nodes.resize(index.size());
  {
    std::uint32_t i = 0;
    for (auto& [key, idx] : index) {
      idx = i;
      out.nodes[i].id = key;
      ++i;
    }
  }

  // Node attributes.
  std::vector<std::set<std::string>> node_areas(out.nodes.size());
  std::vector<char> oa_seen(out.nodes.size(), 0);
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    auto& units = out.record_units[i];
    for (const auto& key : keys[i]) units.push_back(index.at(key));
    std::sort(units.begin(), units.end());
    for (auto u : units) ++out.nodes[u].citations;
    if (level == Level::work || level == Level::journal) {
      for (auto j : r.journals) {
        const auto& cj = corpus.journals[j];
        const auto u = level == Level::work ? units.front() : index.at(cj.record.journal_id);
        node_areas[u].insert(cj.areas.begin(), cj.areas.end());
        auto& n = out.nodes[u];
        n.open_access = detail::merge_open_access(n.open_access, cj.record.open_access, !oa_seen[u]);
        oa_seen[u] = 1;
        if (level == Level::journal) n.label = cj.record.title;
      }
    }
  }
  for (std::size_t u = 0; u < out.nodes.size(); ++u) {
    auto& n = out.nodes[u];
    switch (level) {
      case Level::work: n.label = n.id; break;
      case Level::journal: break;
      case Level::field: {
        const int code = std::stoi(n.id);
        n.label = scheme.field_name(code);
        node_areas[u].insert(scheme.area_of_code(code));
        break;
      }
      case Level::main_field: {
        const int code = std::stoi(n.id) * 100;
        n.label = scheme.main_field_of_code(code);
        node_areas[u].insert(scheme.area_of_main_field(n.label));
        break;
      }
      case Level::area:
        n.label = n.id;
        for (const auto& j : corpus.journals)
          if (j.area_label == n.id) {
            node_areas[u].insert(j.areas.begin(), j.areas.end());
            break;
          }
        break;
    }
    n.areas.assign(node_areas[u].begin(), node_areas[u].end());
    n.area_label = combined_area_label(n.areas);
  }
  return out;
}

namespace detail {

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Appends one edge per distinct key of the sorted `keys`.
inline void append_runs(const std::vector<std::uint64_t>& keys, std::vector<Edge>& out) {
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) distinct += i == 0 || keys[i] != keys[i - 1];
  out.reserve(out.size() + distinct);
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    out.push_back({static_cast<std::uint32_t>(keys[i] >> 32), static_cast<std::uint32_t>(keys[i] & 0xffffffffu),
                   static_cast<std::int64_t>(j - i)});
    i = j;
  }
}

}  // namespace detail

struct CoCitationOptions {
  CountMode mode = CountMode::set;
  unsigned workers = 1;
  std::uint64_t pass_keys = std::uint64_t{1} << 24;  // raw pair keys buffered per pass
};

/// Co-citation graph of `corpus` at `level`. Records must be grouped by citing entry, which
/// LinkedCorpus guarantees. Pairs are counted in passes over ranges of the smaller unit id so
/// the key buffer stays bounded; passes come out in canonical edge order.
inline CoCitationGraph build_cocitation(const LinkedCorpus& corpus, Level level, const CoCitationOptions& opts = {}) {
  auto units = assign_units(corpus, level);
  const auto n_units = static_cast<std::uint32_t>(units.nodes.size());
  const bool set_mode = opts.mode == CountMode::set;

  // Entry boundaries over the (entry, work)-sorted records.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    if (i == 0 || corpus.records[i].ref.citing_entry_id != corpus.records[i - 1].ref.citing_entry_id)
      starts.push_back(i);
  starts.push_back(corpus.records.size());
  const std::size_t n_entries = starts.size() - 1;

  // Set mode: distinct sorted units per entry.
  std::vector<std::size_t> set_off{0};
  std::vector<std::uint32_t> set_units;
  if (set_mode) {
    for (std::size_t e = 0; e < n_entries; ++e) {
      const auto first = set_units.size();
      for (std::size_t i = starts[e]; i < starts[e + 1]; ++i)
        set_units.insert(set_units.end(), units.record_units[i].begin(), units.record_units[i].end());
      const auto begin = set_units.begin() + static_cast<std::ptrdiff_t>(first);
      std::sort(begin, set_units.end());
      set_units.erase(std::unique(begin, set_units.end()), set_units.end());
      set_off.push_back(set_units.size());
    }
  }

  // Calls f(x, y) with x < y for each pair of entry e whose smaller unit lies in [lo, hi).
  auto each_pair = [&](std::size_t e, std::uint32_t lo, std::uint32_t hi, auto&& f) {
    if (set_mode) {
      const auto* first = set_units.data() + set_off[e];
      const auto* last = set_units.data() + set_off[e + 1];
      for (const auto* a = std::lower_bound(first, last, lo); a != last && *a < hi; ++a)
        for (const auto* b = a + 1; b != last; ++b) f(*a, *b);
      return;
    }
    for (std::size_t a = starts[e]; a < starts[e + 1]; ++a)
      for (std::size_t b = a + 1; b < starts[e + 1]; ++b)
        for (auto ua : units.record_units[a])
          for (auto ub : units.record_units[b]) {
            if (ua == ub) continue;
            const auto x = std::min(ua, ub);
            if (x >= lo && x < hi) f(x, std::max(ua, ub));
          }
  };

  std::vector<std::uint64_t> per_unit(n_units, 0);
  for (std::size_t e = 0; e < n_entries; ++e) {
    if (set_mode) {
      const std::size_t m = set_off[e + 1] - set_off[e];
      for (std::size_t i = 0; i < m; ++i) per_unit[set_units[set_off[e] + i]] += m - i - 1;
    } else {
      each_pair(e, 0, n_units, [&](std::uint32_t x, std::uint32_t) { ++per_unit[x]; });
    }
  }
  std::vector<std::uint32_t> bounds{0};
  std::uint64_t load = 0;
  for (std::uint32_t u = 0; u < n_units; ++u) {
    if (load > 0 && load + per_unit[u] > opts.pass_keys) {
      bounds.push_back(u);
      load = 0;
    }
    load += per_unit[u];
  }
  bounds.push_back(n_units);

  const unsigned workers = std::max(1u, opts.workers);
  std::vector<std::vector<Edge>> pieces;
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const auto lo = bounds[p], hi = bounds[p + 1];
    std::vector<std::vector<std::uint64_t>> bufs(workers);
    parallel_chunks(n_entries, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
      auto& keys = bufs[w];
      for (std::size_t e = begin; e < end; ++e)
        each_pair(e, lo, hi, [&](std::uint32_t x, std::uint32_t y) { keys.push_back(detail::pair_key(x, y)); });
      std::sort(keys.begin(), keys.end());
    });
    auto keys = std::move(bufs[0]);
    for (std::size_t w = 1; w < bufs.size(); ++w) {
      const auto mid = static_cast<std::ptrdiff_t>(keys.size());
      keys.insert(keys.end(), bufs[w].begin(), bufs[w].end());
      std::vector<std::uint64_t>().swap(bufs[w]);
      std::inplace_merge(keys.begin(), keys.begin() + mid, keys.end());
    }
    pieces.emplace_back();
    detail::append_runs(keys, pieces.back());
  }

  CoCitationGraph g;
  g.level = level;
  g.mode = opts.mode;
  g.nodes = std::move(units.nodes);
  std::size_t total = 0;
  for (const auto& piece : pieces) total += piece.size();
  g.edges.reserve(total);
  for (auto& piece : pieces) {
    g.edges.insert(g.edges.end(), piece.begin(), piece.end());
    std::vector<Edge>().swap(piece);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Components

struct ComponentCensus {
  CoCitationGraph giant;
  std::vector<std::size_t> sizes;  // descending
};

/// Largest connected component; ties go to the component holding the smallest node index.
inline ComponentCensus giant_component(const CoCitationGraph& g) {
  if (g.empty()) throw Error(ErrorKind::EmptyInput, "giant_component of an empty graph");
  const auto label = component_labels(g);
  std::vector<std::size_t> size;
  for (auto l : label) {
    if (l >= size.size()) size.resize(l + 1, 0);
    ++size[l];
  }
  // Labels follow smallest node index, so the first maximum wins ties.
  const auto best = static_cast<std::uint32_t>(std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<char> keep(g.node_count());
  for (std::size_t n = 0; n < keep.size(); ++n) keep[n] = label[n] == best;
  ComponentCensus c;
  c.giant = g.induced(keep);
  c.sizes = size;
  std::sort(c.sizes.begin(), c.sizes.end(), std::greater<>());
  return c;
}

// ---------------------------------------------------------------------------
// Threshold filter

enum class FilterMode { edge_weight, node_strength };

/// edge_weight: drop edges with weight < threshold. node_strength: drop nodes whose weighted
/// degree is < threshold with their edges. Either way, nodes that lose all their edges are
/// removed; nodes that had none to begin with are kept.
inline CoCitationGraph filter_edges_min_weight(const CoCitationGraph& g, std::int64_t threshold,
                                               FilterMode mode = FilterMode::edge_weight) {
  if (threshold < 1) throw Error(ErrorKind::InvalidArgument, "threshold must be >= 1");
  std::vector<char> keep_edge(g.edge_count(), 1);
  if (mode == FilterMode::edge_weight) {
    for (std::size_t i = 0; i < g.edges.size(); ++i) keep_edge[i] = g.edges[i].weight >= threshold;
  } else {
    const auto strength = weighted_degree(g);
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      keep_edge[i] = strength[g.edges[i].u] >= threshold && strength[g.edges[i].v] >= threshold;
  }
  std::vector<char> had(g.node_count(), 0), has(g.node_count(), 0);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    had[g.edges[i].u] = had[g.edges[i].v] = 1;
    if (keep_edge[i]) has[g.edges[i].u] = has[g.edges[i].v] = 1;
  }
  std::vector<char> keep_node(g.node_count());
  for (std::size_t n = 0; n < keep_node.size(); ++n) keep_node[n] = has[n] || !had[n];
  return g.with_edges(keep_edge).induced(keep_node);
}

// ---------------------------------------------------------------------------
// Intra/inter-group shares

struct GroupShare {
  std::int64_t total_weight = 0;  // incident weight; intra edges count once per endpoint
  double intra = 0;
  double inter = 0;
};

/// Groups per node from area labels. Combined labels form their own group unless decomposed.
inline std::vector<std::vector<std::string>> area_groups(const CoCitationGraph& g, bool decompose = false) {
  std::vector<std::vector<std::string>> out(g.node_count());
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (decompose)
      out[n] = g.nodes[n].areas;
    else if (!g.nodes[n].area_label.empty())
      out[n] = {g.nodes[n].area_label};
  }
  return out;
}

/// For each group, the incident edge weight split into same-group and cross-group fractions.
inline std::map<std::string, GroupShare> intra_inter_shares(const CoCitationGraph& g,
                                                            const std::vector<std::vector<std::string>>& groups) {
  if (groups.size() != g.node_count()) throw Error(ErrorKind::InvalidArgument, "one group list per node required");
  for (std::size_t n = 0; n < groups.size(); ++n)
    if (groups[n].empty()) throw Error(ErrorKind::GroupMissing, "node " + g.nodes[n].id + " has no group");
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> acc;  // intra, inter
  auto contains = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const auto& e : g.edges) {
    for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}})
      for (const auto& grp : groups[a]) {
        auto& slot = acc[grp];
        (contains(groups[b], grp) ? slot.first : slot.second) += e.weight;
      }
  }
  std::map<std::string, GroupShare> out;
  for (const auto& [grp, c] : acc) {
    GroupShare s;
    s.total_weight = c.first + c.second;
    s.intra = static_cast<double>(c.first) / static_cast<double>(s.total_weight);
    s.inter = static_cast<double>(c.second) / static_cast<double>(s.total_weight);
    out.emplace(grp, s);
  }
  return out;
}

struct CoCitationTotals {
  std::size_t nodes = 0;
  std::size_t cocited_nodes = 0;  // nodes with at least one edge
  std::size_t edges = 0;
  std::int64_t total_weight = 0;
};

inline CoCitationTotals cocitation_totals(const CoCitationGraph& g) {
  CoCitationTotals t;
  t.nodes = g.node_count();
  t.edges = g.edge_count();
  std::vector<char> touched(g.node_count(), 0);
  for (const auto& e : g.edges) {
    t.total_weight += e.weight;
    touched[e.u] = touched[e.v] = 1;
  }
  t.cocited_nodes = static_cast<std::size_t>(std::count(touched.begin(), touched.end(), 1));
  return t;
}

}  // namespace scimap
