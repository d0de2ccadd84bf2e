#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "gsamp/graph.hpp"

namespace gsamp {

inline constexpr Index kDefaultOracleLimit = 2000;

/// Full eigen-decomposition of the normalized Laplacian: ascending
/// eigenvalues and orthonormal eigenvectors as columns.
struct SpectralBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Index size() const { return eigenvalues.size(); }
};

/// Flips v so that its first component with |v_i| > 1e-8 * max|v| is positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-8 * scale) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

/// Dense normalized Laplacian; only for oracle-sized graphs.
inline Eigen::MatrixXd dense_laplacian(const Graph& graph,
                                       Index limit = kDefaultOracleLimit) {
  if (graph.size() > limit) throw SizeLimitError(graph.size(), limit);
  const auto& s = graph.inv_sqrt_degrees();
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(graph.size(), graph.size());
  for (Index i = 0; i < graph.size(); ++i)
    graph.for_each_neighbor(i, [&](Index j, double w) { l(i, j) = -w * s[i] * s[j]; });
  return l;
}

inline SpectralBasis dense_spectral_basis(const Graph& graph,
                                          Index limit = kDefaultOracleLimit) {
  const Eigen::MatrixXd l = dense_laplacian(graph, limit);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success)
    throw NumericalError("dense eigen-decomposition of the Laplacian failed");
  SpectralBasis basis{solver.eigenvalues(), solver.eigenvectors()};
  for (Index i = 0; i < basis.size(); ++i) fix_sign(basis.eigenvectors.col(i));
  return basis;
}

/// Graph Fourier transform: coefficient i is <f, u_i>.
inline Eigen::VectorXd gft(const SpectralBasis& basis, const GraphSignal& f) {
  detail::require(f.size() == basis.size(), "signal length does not match basis");
  return basis.eigenvectors.transpose() * f;
}

inline GraphSignal inverse_gft(const SpectralBasis& basis,
                               const Eigen::VectorXd& coefficients) {
  detail::require(coefficients.size() == basis.size(),
                  "coefficient count does not match basis");
  return basis.eigenvectors * coefficients;
}

}  // namespace gsamp
