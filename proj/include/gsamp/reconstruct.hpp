#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "gsamp/filter.hpp"

namespace gsamp {

/// Observed values f(S), aligned with `nodes`.
struct SampledSignal {
  std::vector<Index> nodes;
  Eigen::VectorXd values;

  Index size() const { return static_cast<Index>(nodes.size()); }
};

inline SampledSignal sample(const GraphSignal& f, std::span<const Index> s) {
  complement(f.size(), s);  // validates range and uniqueness
  SampledSignal out;
  out.nodes.assign(s.begin(), s.end());
  out.values.resize(static_cast<Index>(s.size()));
  for (std::size_t a = 0; a < s.size(); ++a) out.values[static_cast<Index>(a)] = f[s[a]];
  return out;
}

namespace detail {

inline void validate_samples(const SampledSignal& samples, Index n) {
  require(samples.values.size() == samples.size(), "sample values and nodes differ in length");
  complement(n, samples.nodes);
  for (Index a = 0; a < samples.values.size(); ++a)
    if (!std::isfinite(samples.values[a]))
      throw ConfigError("non-finite sample at node " +
                        std::to_string(samples.nodes[static_cast<std::size_t>(a)]));
}

}  // namespace detail

/// Least-squares fit in the span of {u_i : lambda_i < omega} to the samples,
/// through the pseudoinverse of U_{S,K}. Throws RankDeficientError when
/// U_{S,K} has numerical rank (tolerance 1e-10 * largest singular value)
/// below |K|, since the fit is then not unique.
inline GraphSignal least_squares_reconstruct(const SpectralBasis& basis,
                                             const SampledSignal& samples, double omega) {
  detail::validate_samples(samples, basis.size());
  std::vector<Index> band;
  for (Index i = 0; i < basis.size(); ++i)
    if (basis.eigenvalues[i] < omega) band.push_back(i);
  if (band.empty())
    throw ConfigError("no eigenvalue lies below omega = " + std::to_string(omega) +
                      "; the passband is empty");
  const Index columns = static_cast<Index>(band.size());
  Eigen::MatrixXd u_sk(samples.size(), columns);
  for (Index a = 0; a < samples.size(); ++a)
    for (Index b = 0; b < columns; ++b)
      u_sk(a, b) =
          basis.eigenvectors(samples.nodes[static_cast<std::size_t>(a)], band[static_cast<std::size_t>(b)]);

  Index rank = 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  if (samples.size() > 0) {
    svd.compute(u_sk, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-10 * sv[0]) ++rank;
  }
  if (rank < columns) throw RankDeficientError(rank, columns);

  Eigen::VectorXd alpha = svd.matrixV() *
                          (svd.matrixU().transpose() * samples.values)
                              .cwiseQuotient(svd.singularValues());
  GraphSignal out = GraphSignal::Zero(basis.size());
  for (Index b = 0; b < columns; ++b) out += alpha[b] * basis.eigenvectors.col(band[static_cast<std::size_t>(b)]);
  return out;
}

struct PocsConfig {
  int max_iters = 2000;
  double stop_tol = 1e-7;  // relative change between iterates
  // The kernel's omega is replaced by the omega passed to the reconstruction.
  SpectralKernel kernel = sigmoid_kernel(1.0, kDefaultSigmoidAlpha);
  int degree = kDefaultFilterDegree;  // polynomial path only
  // Overrides the zero-fill-then-filter starting point when nonempty.
  GraphSignal initial;
};

struct PocsResult {
  GraphSignal signal;  // P_S applied to the final iterate
  int iterations = 0;
  bool converged = false;
  double last_change = 0.0;
  double filter_error = 0.0;  // measured grid error of the polynomial filter
};

namespace detail {

inline void validate_pocs(const PocsConfig& config, double omega) {
  require(config.max_iters >= 1, "POCS needs at least one iteration");
  require(config.stop_tol > 0.0, "POCS stop tolerance must be positive");
  require(omega > 0.0 && std::isfinite(omega), "reconstruction cutoff omega must be positive");
}

// Sets the samples on S (the projection onto the sample-consistent set).
inline void reset_samples(GraphSignal& f, const SampledSignal& samples) {
  for (Index a = 0; a < samples.size(); ++a)
    f[samples.nodes[static_cast<std::size_t>(a)]] = samples.values[a];
}

inline PocsResult pocs_iterate(Index n, const SampledSignal& samples, const PocsConfig& config,
                               const std::function<GraphSignal(const GraphSignal&)>& filter) {
  GraphSignal f;
  if (config.initial.size() != 0) {
    require(config.initial.size() == n, "initial POCS iterate has the wrong length");
    f = config.initial;
  } else {
    GraphSignal zero_filled = GraphSignal::Zero(n);
    reset_samples(zero_filled, samples);
    f = filter(zero_filled);
  }
  PocsResult result;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    GraphSignal g = f;
    reset_samples(g, samples);
    GraphSignal next = filter(g);
    const double base = f.norm();
    const double change = (next - f).norm();
    result.last_change = base > 0.0 ? change / base : change;
    f.swap(next);
    result.iterations = iter;
    if (result.last_change <= config.stop_tol) {
      result.converged = true;
      break;
    }
  }
  reset_samples(f, samples);
  result.signal = std::move(f);
  return result;
}

}  // namespace detail

/// Alternating projections f_{i+1} = P_omega P_S f_i, with P_omega the
/// Chebyshev approximation (degree config.degree) of config.kernel moved to
/// cutoff omega, applied matrix-free. Stops when the relative change between
/// iterates drops to stop_tol; otherwise returns the last iterate with
/// converged = false.
inline PocsResult pocs_reconstruct(const Graph& graph, const SampledSignal& samples,
                                   double omega, const PocsConfig& config = {}) {
  detail::validate_pocs(config, omega);
  detail::validate_samples(samples, graph.size());
  SpectralKernel source = config.kernel;
  source.omega = omega;
  const SpectralKernel poly = source.kind == KernelKind::polynomial
                                  ? source
                                  : chebyshev_approximate(source, config.degree);
  PocsResult result = detail::pocs_iterate(
      graph.size(), samples, config,
      [&](const GraphSignal& x) { return apply_filter(graph, poly, x); });
  result.filter_error = poly.approx_error;
  return result;
}

/// Same iteration with exact spectral filtering by config.kernel (moved to
/// cutoff omega unless it is a polynomial); oracle-sized graphs only.
inline PocsResult pocs_reconstruct(const SpectralBasis& basis, const SampledSignal& samples,
                                   double omega, const PocsConfig& config = {}) {
  detail::validate_pocs(config, omega);
  detail::validate_samples(samples, basis.size());
  SpectralKernel kernel = config.kernel;
  if (kernel.kind != KernelKind::polynomial) kernel.omega = omega;
  return detail::pocs_iterate(
      basis.size(), samples, config,
      [&](const GraphSignal& x) { return apply_exact_filter(basis, kernel, x); });
}

}  // namespace gsamp
