#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gsamp/graph.hpp"

namespace gsamp {

/// One datapoint per row.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Similarity { gaussian, cosine };

struct GraphBuildConfig {
  int neighbors = 10;
  Similarity similarity = Similarity::gaussian;
  std::optional<double> sigma_override;
  // sigma = sigma_scale * mean distance to the K-th nearest neighbor.
  double sigma_scale = 1.0 / 3.0;
};

namespace detail {

inline void validate_features(const FeatureMatrix& x, int neighbors) {
  require(x.rows() >= 2, "feature matrix needs at least 2 rows");
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j)
      if (!std::isfinite(x(i, j)))
        throw ConfigError("non-finite feature at row " + std::to_string(i) +
                          ", column " + std::to_string(j));
  require(neighbors >= 1 && neighbors < x.rows(),
          "neighbor count K must satisfy 1 <= K < N (K = " +
              std::to_string(neighbors) + ", N = " + std::to_string(x.rows()) + ")");
}

struct Neighbor {
  Index node;
  double key;  // distance, or negated similarity
};

// The `count` smallest keys among j != i, ties broken by lower index.
template <typename KeyFn>
std::vector<Neighbor> nearest(Index n, Index i, int count, KeyFn&& key) {
  std::vector<Neighbor> all;
  all.reserve(static_cast<std::size_t>(n) - 1);
  for (Index j = 0; j < n; ++j)
    if (j != i) all.push_back({j, key(j)});
  auto order = [](const Neighbor& a, const Neighbor& b) {
    return a.key < b.key || (a.key == b.key && a.node < b.node);
  };
  std::partial_sort(all.begin(), all.begin() + count, all.end(), order);
  all.resize(static_cast<std::size_t>(count));
  return all;
}

inline double euclidean(const FeatureMatrix& x, Index i, Index j) {
  double acc = 0.0;
  for (Index c = 0; c < x.cols(); ++c) {
    const double d = x(i, c) - x(j, c);
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline std::vector<std::vector<Neighbor>> euclidean_neighbors(const FeatureMatrix& x,
                                                              int count) {
  std::vector<std::vector<Neighbor>> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i)
    out.push_back(nearest(x.rows(), i, count, [&](Index j) { return euclidean(x, i, j); }));
  return out;
}

inline double mean_kth_distance(const std::vector<std::vector<Neighbor>>& nbrs) {
  double sum = 0.0;
  for (const auto& row : nbrs) sum += row.back().key;
  return sum / static_cast<double>(nbrs.size());
}

// Union symmetrization: edge (i, j) is kept when either endpoint lists the
// other. The weight is a symmetric function of the pair, so either copy works.
inline Graph union_graph(Index n, std::vector<Edge> edges) {
  for (auto& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }),
              edges.end());
  try {
    return Graph::from_edges(n, edges);
  } catch (const DisconnectedGraphError& e) {
    throw DisconnectedGraphError(e.components(), "increase the neighbor count K");
  } catch (const IsolatedNodeError& e) {
    throw ConfigError(std::string(e.what()) + "; increase the neighbor count K");
  }
}

}  // namespace detail

/// Kernel width from the heuristic: scale * mean over all points of the
/// distance to their K-th nearest neighbor. Deterministic (fixed summation order).
inline double gaussian_sigma(const FeatureMatrix& features, int neighbors,
                             double scale = 1.0 / 3.0) {
  detail::validate_features(features, neighbors);
  return scale * detail::mean_kth_distance(detail::euclidean_neighbors(features, neighbors));
}

/// Gaussian-kernel K-nearest-neighbor graph, w_ij = exp(-|x_i - x_j|^2 / 2 sigma^2),
/// symmetrized by union. Exact brute-force search.
inline Graph build_knn_gaussian(const FeatureMatrix& features,
                                const GraphBuildConfig& config = {}) {
  detail::validate_features(features, config.neighbors);
  const auto nbrs = detail::euclidean_neighbors(features, config.neighbors);
  double sigma = 0.0;
  if (config.sigma_override) {
    sigma = *config.sigma_override;
    detail::require(sigma > 0.0 && std::isfinite(sigma), "sigma override must be positive");
  } else {
    detail::require(config.sigma_scale > 0.0, "sigma scale must be positive");
    const double mean_kth = detail::mean_kth_distance(nbrs);
    if (!(mean_kth > 0.0))
      throw ConfigError(
          "kernel width is zero: mean distance to the K-th nearest neighbor is 0 "
          "(duplicate points)");
    sigma = config.sigma_scale * mean_kth;
  }

  const double denom = 2.0 * sigma * sigma;
  std::vector<Edge> edges;
  for (Index i = 0; i < features.rows(); ++i)
    for (const auto& nb : nbrs[static_cast<std::size_t>(i)]) {
      const double w = std::exp(-nb.key * nb.key / denom);
      // Underflow only for extreme outliers; such an edge carries no weight.
      if (w > 0.0) edges.push_back({i, nb.node, w});
    }
  return detail::union_graph(features.rows(), std::move(edges));
}

/// Cosine-similarity K-nearest-neighbor graph. Nonpositive similarities are
/// dropped because edge weights must be positive.
inline Graph build_knn_cosine(const FeatureMatrix& features,
                              const GraphBuildConfig& config = {}) {
  detail::validate_features(features, config.neighbors);
  Eigen::VectorXd norms = features.rowwise().norm();
  for (Index i = 0; i < features.rows(); ++i)
    if (!(norms[i] > 0.0))
      throw ConfigError("row " + std::to_string(i) +
                        " has zero norm; cosine similarity is undefined");
  auto similarity = [&](Index i, Index j) {
    return features.row(i).dot(features.row(j)) / (norms[i] * norms[j]);
  };
  std::vector<Edge> edges;
  for (Index i = 0; i < features.rows(); ++i) {
    auto best = detail::nearest(features.rows(), i, config.neighbors,
                                [&](Index j) { return -similarity(i, j); });
    for (const auto& nb : best)
      if (-nb.key > 0.0) edges.push_back({i, nb.node, -nb.key});
  }
  return detail::union_graph(features.rows(), std::move(edges));
}

inline Graph build_knn_graph(const FeatureMatrix& features,
                             const GraphBuildConfig& config = {}) {
  return config.similarity == Similarity::gaussian ? build_knn_gaussian(features, config)
                                                   : build_knn_cosine(features, config);
}

}  // namespace gsamp
