#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gsamp/eigensolver.hpp"

namespace gsamp {

inline constexpr int kDefaultPower = 8;

/// Selected nodes in selection order. cutoffs[t] is the estimate after the
/// (t+1)-th addition.
struct SamplingSet {
  std::vector<Index> nodes;
  std::vector<double> cutoffs;
  int k = kDefaultPower;

  Index size() const { return static_cast<Index>(nodes.size()); }
  /// The first `count` selections; greedy sets are nested, so prefixes of a
  /// greedy run are the greedy sets of smaller size.
  SamplingSet prefix(Index count) const {
    detail::require(count >= 0 && count <= size(), "prefix longer than the set");
    SamplingSet out;
    out.k = k;
    out.nodes.assign(nodes.begin(), nodes.begin() + count);
    if (static_cast<Index>(cutoffs.size()) >= count)
      out.cutoffs.assign(cutoffs.begin(), cutoffs.begin() + count);
    return out;
  }
  /// Estimate for the whole set (0 for an empty set).
  double cutoff() const { return cutoffs.empty() ? 0.0 : cutoffs.back(); }
};

/// Smoothest signal supported on the complement of S.
struct SmoothestSignal {
  GraphSignal values;  // zero on S, unit norm
  double bandwidth_estimate = 0.0;  // Omega_k(S) = eigenvalue^(1/k)
  double eigenvalue = 0.0;  // smallest eigenvalue of (L^k)_{Sc}
};

/// Rayleigh-quotient bandwidth (phi^T L^k phi / phi^T phi)^(1/k).
inline double bandwidth_estimate(const Graph& graph, const GraphSignal& phi, int k) {
  detail::require_length(graph, phi);
  detail::validate_power(k);
  const double norm2 = phi.squaredNorm();
  if (!(norm2 > 0.0)) throw ConfigError("bandwidth of the zero signal is undefined");
  // phi^T L^k phi = |L^{k/2} phi|^2 (even) or |C L^{(k-1)/2} phi|^2 (odd).
  GraphSignal half = laplacian_power_apply(graph, phi, k / 2);
  const double quad = (k % 2 == 1) ? incidence_apply(graph, half).squaredNorm()
                                   : half.squaredNorm();
  return std::pow(quad / norm2, 1.0 / k);
}

namespace detail {

inline SmoothestSignal smoothest_from_pair(const Graph& graph,
                                           const std::vector<Index>& sc,
                                           const EigenPair& pair, int k) {
  SmoothestSignal out;
  out.values = GraphSignal::Zero(graph.size());
  for (std::size_t a = 0; a < sc.size(); ++a)
    out.values[sc[a]] = pair.vector[static_cast<Index>(a)];
  out.eigenvalue = std::max(pair.value, 0.0);
  out.bandwidth_estimate = std::pow(out.eigenvalue, 1.0 / k);
  return out;
}

inline SmoothestSignal estimate_cutoff_with(const RestrictedEigenSolver& solver,
                                            const Graph& graph, std::span<const Index> s,
                                            const Eigen::VectorXd& initial = {}) {
  const std::vector<Index> sc = complement(graph.size(), s);
  if (sc.empty())
    throw ConfigError("sampling set covers every node; the cutoff is undefined");
  return smoothest_from_pair(graph, sc, solver.solve(sc, initial), solver.power());
}

}  // namespace detail

/// Omega_k(S) and the smoothest signal phi_k* vanishing on S. An empty S gives
/// Omega = 0 with phi proportional to D^{1/2} 1.
inline SmoothestSignal estimate_cutoff(const Graph& graph, std::span<const Index> s, int k,
                                       const SolverConfig& config = {}) {
  return detail::estimate_cutoff_with(RestrictedEigenSolver(graph, k, config), graph, s);
}

/// Index of the largest phi_i^2 over i not in S; ties go to the lowest index.
inline Index argmax_squared(const GraphSignal& phi, std::span<const Index> s) {
  std::vector<char> taken(static_cast<std::size_t>(phi.size()), 0);
  for (Index i : s) taken[static_cast<std::size_t>(i)] = 1;
  Index best = -1;
  double best_value = -1.0;
  for (Index i = 0; i < phi.size(); ++i) {
    if (taken[static_cast<std::size_t>(i)]) continue;
    const double v = phi[i] * phi[i];
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

/// Greedy selection: starting from S = {}, repeatedly add the node where the
/// current smoothest complement signal has the largest squared entry.
/// Each solve is warm-started from the previous signal.
inline SamplingSet greedy_select(const Graph& graph, Index m, int k,
                                 const SolverConfig& config = {}) {
  detail::validate_power(k);
  detail::require(m >= 1, "sample size m must be at least 1");
  if (m >= graph.size())
    throw ConfigError("sample size m = " + std::to_string(m) +
                      " must be smaller than the node count " +
                      std::to_string(graph.size()));
  detail::require(graph.connected(), "greedy selection requires a connected graph");

  const RestrictedEigenSolver solver(graph, k, config);
  SamplingSet out;
  out.k = k;
  GraphSignal phi = detail::estimate_cutoff_with(solver, graph, {}).values;
  for (Index step = 0; step < m; ++step) {
    const Index v = argmax_squared(phi, out.nodes);
    out.nodes.push_back(v);
    const std::vector<Index> sc = complement(graph.size(), out.nodes);
    Eigen::VectorXd initial(static_cast<Index>(sc.size()));
    for (std::size_t a = 0; a < sc.size(); ++a) initial[static_cast<Index>(a)] = phi[sc[a]];
    const SmoothestSignal next =
        detail::estimate_cutoff_with(solver, graph, out.nodes, initial);
    out.cutoffs.push_back(next.bandwidth_estimate);
    phi = next.values;
  }
  return out;
}

/// The first m entries of a seeded uniform permutation of the nodes. Growing m
/// with the same seed extends the set. No cutoffs are computed here; see
/// record_cutoffs.
inline SamplingSet random_baseline_select(Index n, Index m, std::uint64_t seed,
                                          int k = kDefaultPower) {
  detail::require(m >= 1, "sample size m must be at least 1");
  if (m >= n)
    throw ConfigError("sample size m = " + std::to_string(m) +
                      " must be smaller than the node count " + std::to_string(n));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with an explicit draw so the sequence does not depend
  // on the standard library's shuffle.
  for (Index i = 0; i < m; ++i) {
    const auto span = static_cast<std::uint64_t>(n - i);
    const Index j = i + static_cast<Index>(rng() % span);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  SamplingSet out;
  out.k = k;
  out.nodes.assign(order.begin(), order.begin() + m);
  return out;
}

/// Fills set.cutoffs with Omega_k of every prefix. With `last_only`, only the
/// full set is solved and the vector holds a single value.
inline void record_cutoffs(const Graph& graph, SamplingSet& set,
                           const SolverConfig& config = {}, bool last_only = false) {
  const RestrictedEigenSolver solver(graph, set.k, config);
  set.cutoffs.clear();
  for (Index t = last_only ? set.size() : 1; t <= set.size(); ++t) {
    const std::span<const Index> prefix(set.nodes.data(), static_cast<std::size_t>(t));
    set.cutoffs.push_back(detail::estimate_cutoff_with(solver, graph, prefix).bandwidth_estimate);
  }
}

/// p_j / d_j for every j outside S, in increasing node order, where p_j is the
/// total weight of the edges from j into S.
inline Eigen::VectorXd partial_out_degree_ratios(const Graph& graph,
                                                 std::span<const Index> s) {
  const std::vector<Index> sc = complement(graph.size(), s);
  std::vector<char> in_s(static_cast<std::size_t>(graph.size()), 0);
  for (Index i : s) in_s[static_cast<std::size_t>(i)] = 1;
  Eigen::VectorXd ratios(static_cast<Index>(sc.size()));
  for (std::size_t a = 0; a < sc.size(); ++a) {
    double crossing = 0.0;
    graph.for_each_neighbor(sc[a], [&](Index j, double w) {
      if (in_s[static_cast<std::size_t>(j)]) crossing += w;
    });
    ratios[static_cast<Index>(a)] = crossing / graph.degree(sc[a]);
  }
  return ratios;
}

/// min_j p_j / d_j, the infimum of the first-order surrogate of Omega_1(S).
inline double surrogate_cutoff_min_ratio(const Graph& graph, std::span<const Index> s) {
  detail::require(!s.empty(), "surrogate cutoff needs a nonempty sampling set");
  const Eigen::VectorXd ratios = partial_out_degree_ratios(graph, s);
  detail::require(ratios.size() > 0, "surrogate cutoff needs a nonempty complement");
  return ratios.minCoeff();
}

}  // namespace gsamp
