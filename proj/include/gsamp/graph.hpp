#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gsamp/error.hpp"

namespace gsamp {

/// Length-n real vector indexed by node.
using GraphSignal = Eigen::VectorXd;

/// Undirected weighted edge; stored once, symmetrized on construction.
struct Edge {
  Index u = 0;
  Index v = 0;
  double w = 0.0;
};

struct GraphOptions {
  // Disconnected graphs are accepted only for diagnostics (e.g. counting
  // zero eigenvalues); every sampling/reconstruction op rejects them.
  bool require_connected = true;
};

/// Sparse weighted undirected graph in compressed row form.
///
/// Immutable after construction. The adjacency is exactly symmetric, has no
/// self-loops and only strictly positive weights. Every node has positive
/// degree, so the normalized Laplacian L = I - D^{-1/2} W D^{-1/2} is defined.
class Graph {
 public:
  Graph() = default;

  static Graph from_edges(Index n, std::span<const Edge> edges,
                          GraphOptions options = {}) {
    detail::require(n >= 2, "graph needs at least 2 nodes");
    std::vector<std::vector<std::pair<Index, double>>> rows(
        static_cast<std::size_t>(n));
    for (const Edge& e : edges) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
        throw ConfigError("edge (" + std::to_string(e.u) + ", " +
                          std::to_string(e.v) + ") references a node outside [0, " +
                          std::to_string(n) + ")");
      if (e.u == e.v)
        throw ConfigError("self-loop on node " + std::to_string(e.u));
      if (!(e.w > 0.0) || !std::isfinite(e.w))
        throw ConfigError("edge (" + std::to_string(e.u) + ", " +
                          std::to_string(e.v) + ") has non-positive weight");
      rows[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
      rows[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
    }

    Graph g;
    g.n_ = n;
    g.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (Index i = 0; i < n; ++i) {
      auto& row = rows[static_cast<std::size_t>(i)];
      std::sort(row.begin(), row.end());
      for (std::size_t a = 1; a < row.size(); ++a)
        if (row[a].first == row[a - 1].first)
          throw ConfigError("duplicate edge (" + std::to_string(i) + ", " +
                            std::to_string(row[a].first) + ")");
      g.row_ptr_[static_cast<std::size_t>(i) + 1] =
          g.row_ptr_[static_cast<std::size_t>(i)] + static_cast<Index>(row.size());
    }
    g.col_.reserve(static_cast<std::size_t>(g.row_ptr_.back()));
    g.weight_.reserve(static_cast<std::size_t>(g.row_ptr_.back()));
    g.degree_.resize(n);
    for (Index i = 0; i < n; ++i) {
      double d = 0.0;
      for (const auto& [j, w] : rows[static_cast<std::size_t>(i)]) {
        g.col_.push_back(j);
        g.weight_.push_back(w);
        d += w;
      }
      if (d <= 0.0) throw IsolatedNodeError(i);
      g.degree_[i] = d;
    }
    g.inv_sqrt_degree_ = g.degree_.cwiseSqrt().cwiseInverse();

    g.components_ = g.count_components();
    if (options.require_connected && g.components_ != 1)
      throw DisconnectedGraphError(g.components_);
    return g;
  }

  Index size() const { return n_; }
  /// Number of undirected edges.
  Index edge_count() const { return static_cast<Index>(col_.size()) / 2; }
  bool connected() const { return components_ == 1; }
  Index components() const { return components_; }

  const Eigen::VectorXd& degrees() const { return degree_; }
  double degree(Index i) const { return degree_[i]; }
  const Eigen::VectorXd& inv_sqrt_degrees() const { return inv_sqrt_degree_; }

  /// Calls fn(j, w_ij) for every neighbor j of node i, in increasing j.
  template <typename Fn>
  void for_each_neighbor(Index i, Fn&& fn) const {
    for (Index a = row_ptr_[static_cast<std::size_t>(i)];
         a < row_ptr_[static_cast<std::size_t>(i) + 1]; ++a)
      fn(col_[static_cast<std::size_t>(a)], weight_[static_cast<std::size_t>(a)]);
  }

  Index neighbor_count(Index i) const {
    return row_ptr_[static_cast<std::size_t>(i) + 1] -
           row_ptr_[static_cast<std::size_t>(i)];
  }

  /// Each undirected edge once, with u < v, ordered by (u, v).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(edge_count()));
    for (Index i = 0; i < n_; ++i)
      for_each_neighbor(i, [&](Index j, double w) {
        if (j > i) out.push_back({i, j, w});
      });
    return out;
  }

  /// Hop distance from `source` to every node (-1 if unreachable).
  std::vector<Index> hop_distances(Index source) const {
    std::vector<Index> dist(static_cast<std::size_t>(n_), -1);
    std::queue<Index> frontier;
    dist[static_cast<std::size_t>(source)] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const Index i = frontier.front();
      frontier.pop();
      for_each_neighbor(i, [&](Index j, double) {
        if (dist[static_cast<std::size_t>(j)] < 0) {
          dist[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(i)] + 1;
          frontier.push(j);
        }
      });
    }
    return dist;
  }

 private:
  Index count_components() const {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    Index count = 0;
    std::vector<Index> stack;
    for (Index s = 0; s < n_; ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      ++count;
      seen[static_cast<std::size_t>(s)] = 1;
      stack.push_back(s);
      while (!stack.empty()) {
        const Index i = stack.back();
        stack.pop_back();
        for_each_neighbor(i, [&](Index j, double) {
          if (!seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = 1;
            stack.push_back(j);
          }
        });
      }
    }
    return count;
  }

  Index n_ = 0;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_;
  std::vector<double> weight_;
  Eigen::VectorXd degree_;
  Eigen::VectorXd inv_sqrt_degree_;
  Index components_ = 0;
};

namespace detail {

inline void require_length(const Graph& graph, const GraphSignal& x) {
  if (x.size() != graph.size())
    throw ConfigError("signal length " + std::to_string(x.size()) +
                      " does not match graph size " +
                      std::to_string(graph.size()));
}

// y = L x without length checks.
inline void laplacian_apply_into(const Graph& graph, const GraphSignal& x,
                                 GraphSignal& y) {
  const auto& s = graph.inv_sqrt_degrees();
  y.resize(graph.size());
  for (Index i = 0; i < graph.size(); ++i) {
    double acc = 0.0;
    graph.for_each_neighbor(i, [&](Index j, double w) { acc += w * s[j] * x[j]; });
    y[i] = x[i] - s[i] * acc;
  }
}

}  // namespace detail

/// y = L x with L the symmetric normalized Laplacian, never formed densely.
inline GraphSignal laplacian_apply(const Graph& graph, const GraphSignal& x) {
  detail::require_length(graph, x);
  GraphSignal y;
  detail::laplacian_apply_into(graph, x, y);
  return y;
}

/// L^k x by k successive products; k = 0 returns x.
inline GraphSignal laplacian_power_apply(const Graph& graph, const GraphSignal& x,
                                         int k) {
  detail::require_length(graph, x);
  detail::require(k >= 0, "Laplacian power must be nonnegative");
  GraphSignal cur = x;
  GraphSignal next;
  for (int step = 0; step < k; ++step) {
    detail::laplacian_apply_into(graph, cur, next);
    cur.swap(next);
  }
  return cur;
}

/// Weighted incidence factor C with L = C^T C. Row e for edge (u, v), u < v:
/// sqrt(w_uv) * (x_u / sqrt(d_u) - x_v / sqrt(d_v)). Edge order follows
/// Graph::edges().
inline Eigen::VectorXd incidence_apply(const Graph& graph, const GraphSignal& x) {
  const auto& s = graph.inv_sqrt_degrees();
  Eigen::VectorXd y(graph.edge_count());
  Index e = 0;
  for (Index i = 0; i < graph.size(); ++i)
    graph.for_each_neighbor(i, [&](Index j, double w) {
      if (j > i) y[e++] = std::sqrt(w) * (s[i] * x[i] - s[j] * x[j]);
    });
  return y;
}

/// C^T y for an edge-indexed vector y.
inline GraphSignal incidence_transpose_apply(const Graph& graph,
                                             const Eigen::VectorXd& y) {
  const auto& s = graph.inv_sqrt_degrees();
  GraphSignal x = GraphSignal::Zero(graph.size());
  Index e = 0;
  for (Index i = 0; i < graph.size(); ++i)
    graph.for_each_neighbor(i, [&](Index j, double w) {
      if (j > i) {
        const double c = std::sqrt(w) * y[e++];
        x[i] += c * s[i];
        x[j] -= c * s[j];
      }
    });
  return x;
}

/// Sorted complement of `set` in {0, ..., n-1}. Validates indices and
/// rejects duplicates.
inline std::vector<Index> complement(Index n, std::span<const Index> set) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Index i : set) {
    if (i < 0 || i >= n)
      throw ConfigError("node index " + std::to_string(i) + " out of range [0, " +
                        std::to_string(n) + ")");
    if (in[static_cast<std::size_t>(i)])
      throw ConfigError("duplicate node index " + std::to_string(i));
    in[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(n) - set.size());
  for (Index i = 0; i < n; ++i)
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace gsamp
