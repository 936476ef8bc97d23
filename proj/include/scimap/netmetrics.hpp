#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "scimap/error.hpp"
#include "scimap/graph.hpp"
#include "scimap/util/parallel.hpp"

namespace scimap {

/// Shortest-path lengths equal within this relative tolerance count as ties.
inline constexpr double kPathTieTolerance = 1e-12;

inline bool same_length(double a, double b) {
  return std::abs(a - b) <= kPathTieTolerance * std::max(std::abs(a), std::abs(b));
}

struct CentralityOptions {
  bool harmonic_closeness = false;
  double eigen_tolerance = 1e-10;
  int eigen_max_iterations = 1000;
  bool throw_on_no_convergence = true;
  unsigned workers = 1;
};

struct CentralityReport {
  std::vector<double> betweenness;  // unnormalized unordered-pair dependencies
  std::vector<double> closeness;
  std::vector<double> eigenvector;  // max-normalized per component
  bool weighted = false;            // shortest paths over 1/w distances rather than hops
  bool harmonic_closeness = false;
  bool eigen_converged = true;
  double eigen_residual = 0;
  int eigen_iterations = 0;

  std::string normalization() const { return "unnormalized pair counts, equal split over tied shortest paths"; }
  std::string component_handling() const {
    return harmonic_closeness ? "harmonic within component" : "per-component (n_c - 1) / sum of distances";
  }
};

namespace detail {

struct SingleSource {
  std::vector<double> dist;
  std::vector<double> sigma;
  std::vector<std::vector<std::uint32_t>> preds;
  std::vector<std::uint32_t> order;  // settled order, nondecreasing distance
};

inline void shortest_paths(const CoCitationGraph& g, const Adjacency& adj, std::uint32_t s, bool weighted,
                           SingleSource& st) {
  const std::size_t n = g.node_count();
  st.dist.assign(n, -1.0);
  st.sigma.assign(n, 0.0);
  st.preds.assign(n, {});
  st.order.clear();
  st.dist[s] = 0;
  st.sigma[s] = 1;
  if (!weighted) {
    std::vector<std::uint32_t> queue{s};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto v = queue[head];
      st.order.push_back(v);
      for (const auto& nb : adj.of(v)) {
        const auto w = nb.node;
        if (st.dist[w] < 0) {
          st.dist[w] = st.dist[v] + 1;
          queue.push_back(w);
        }
        if (st.dist[w] == st.dist[v] + 1) {
          st.sigma[w] += st.sigma[v];
          st.preds[w].push_back(v);
        }
      }
    }
    return;
  }
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  std::vector<char> settled(n, 0);
  pq.push({0.0, s});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (settled[v] || d != st.dist[v]) continue;
    settled[v] = 1;
    st.order.push_back(v);
    for (const auto& nb : adj.of(v)) {
      const auto w = nb.node;
      if (settled[w]) continue;
      const double nd = d + 1.0 / static_cast<double>(g.edges[nb.edge].weight);
      if (st.dist[w] < 0 || (nd < st.dist[w] && !same_length(nd, st.dist[w]))) {
        st.dist[w] = nd;
        st.sigma[w] = st.sigma[v];
        st.preds[w].assign(1, v);
        pq.push({nd, w});
      } else if (same_length(nd, st.dist[w])) {
        st.sigma[w] += st.sigma[v];
        st.preds[w].push_back(v);
      }
    }
  }
}

}  // namespace detail

struct EigenResult {
  std::vector<double> scores;
  bool converged = true;
  double residual = 0;
  int iterations = 0;
};

/// Power iteration on W + I per connected component, max-normalized. The identity shift keeps
/// the dominant eigenvalue strictly dominant on bipartite components without changing the
/// eigenvector.
inline EigenResult eigenvector_centrality(const CoCitationGraph& g, double tol = 1e-10, int max_iter = 1000) {
  EigenResult r;
  const std::size_t n = g.node_count();
  r.scores.assign(n, 0.0);
  if (n == 0) return r;
  const auto adj = g.adjacency();
  const auto comp = component_labels(g);
  const std::uint32_t n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::vector<std::uint32_t>> members(n_comp);
  for (std::uint32_t v = 0; v < n; ++v) members[comp[v]].push_back(v);

  std::vector<double> x(n, 1.0), y(n, 0.0);
  for (const auto& mem : members) {
    if (mem.size() == 1) {
      r.scores[mem[0]] = 1.0;
      continue;
    }
    double delta = 0;
    int it = 0;
    for (; it < max_iter; ++it) {
      double mx = 0;
      for (auto v : mem) {
        double s = x[v];
        for (const auto& nb : adj.of(v)) s += static_cast<double>(g.edges[nb.edge].weight) * x[nb.node];
        y[v] = s;
        mx = std::max(mx, s);
      }
      delta = 0;
      for (auto v : mem) {
        y[v] /= mx;
        delta = std::max(delta, std::abs(y[v] - x[v]));
        x[v] = y[v];
      }
      if (delta < tol) {
        ++it;
        break;
      }
    }
    r.iterations = std::max(r.iterations, it);
    if (delta >= tol) {
      r.converged = false;
      r.residual = std::max(r.residual, delta);
    }
    for (auto v : mem) r.scores[v] = x[v];
  }
  return r;
}

/// Betweenness, closeness and eigenvector centrality. With `use_distances` shortest paths run
/// over d = 1 / w; otherwise over hop counts.
inline CentralityReport centralities(const CoCitationGraph& g, bool use_distances, const CentralityOptions& opts = {}) {
  if (g.empty()) throw Error(ErrorKind::EmptyInput, "centralities of an empty graph");
  const std::size_t n = g.node_count();
  const auto adj = g.adjacency();
  CentralityReport rep;
  rep.weighted = use_distances;
  rep.harmonic_closeness = opts.harmonic_closeness;
  rep.closeness.assign(n, 0.0);

  const unsigned workers = std::max(1u, opts.workers);
  std::vector<std::vector<double>> partial(workers, std::vector<double>(n, 0.0));
  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    detail::SingleSource st;
    std::vector<double> delta(n);
    auto& bc = partial[w];
    for (std::size_t s = begin; s < end; ++s) {
      detail::shortest_paths(g, adj, static_cast<std::uint32_t>(s), use_distances, st);
      double sum = 0, harmonic = 0;
      for (auto v : st.order)
        if (v != s) {
          sum += st.dist[v];
          harmonic += 1.0 / st.dist[v];
        }
      const std::size_t reached = st.order.size();
      if (reached > 1)
        rep.closeness[s] = opts.harmonic_closeness ? harmonic / static_cast<double>(reached - 1)
                                                   : static_cast<double>(reached - 1) / sum;
      std::fill(delta.begin(), delta.end(), 0.0);
      for (auto it = st.order.rbegin(); it != st.order.rend(); ++it) {
        const auto v = *it;
        for (auto p : st.preds[v]) delta[p] += st.sigma[p] / st.sigma[v] * (1.0 + delta[v]);
        if (v != s) bc[v] += delta[v];
      }
    }
  });
  rep.betweenness.assign(n, 0.0);
  for (const auto& p : partial)
    for (std::size_t v = 0; v < n; ++v) rep.betweenness[v] += p[v];
  // Each unordered pair is reached from both of its endpoints.
  for (auto& b : rep.betweenness) b /= 2.0;

  auto eig = eigenvector_centrality(g, opts.eigen_tolerance, opts.eigen_max_iterations);
  rep.eigenvector = std::move(eig.scores);
  rep.eigen_converged = eig.converged;
  rep.eigen_residual = eig.residual;
  rep.eigen_iterations = eig.iterations;
  if (!eig.converged && opts.throw_on_no_convergence)
    throw Error(ErrorKind::NoConvergence, "eigenvector iteration stopped with residual " + std::to_string(eig.residual));
  return rep;
}

}  // namespace scimap
