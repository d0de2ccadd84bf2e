#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "gsamp/graph.hpp"
#include "gsamp/spectral_basis.hpp"

namespace gsamp {

inline constexpr int kMaxLaplacianPower = 16;

struct SolverConfig {
  double tol = 1e-8;
  int max_iters = 5000;
  std::uint64_t seed = 0;
  int block_size = 3;
};

/// Smallest eigen-pair of (L^k) restricted to a node subset.
struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

inline void validate_power(int k) {
  if (k < 1 || k > kMaxLaplacianPower)
    throw ConfigError("Laplacian power k must lie in [1, " +
                      std::to_string(kMaxLaplacianPower) + "], got " +
                      std::to_string(k));
}

inline void validate_subset(const Graph& graph, std::span<const Index> nodes) {
  if (nodes.empty())
    throw ConfigError("complement of the sampling set is empty; nothing to solve");
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (nodes[a] < 0 || nodes[a] >= graph.size())
      throw ConfigError("node index " + std::to_string(nodes[a]) + " out of range");
    if (a > 0 && nodes[a] <= nodes[a - 1])
      throw ConfigError("node subset must be sorted and duplicate-free");
  }
}

}  // namespace detail

/// (L^k)_{Sc} = P^T L^k P as a matrix-free operator, where P embeds a vector
/// over Sc into the full node set with zeros on S.
///
/// The operator is also exposed through its factor B with (L^k)_{Sc} = B^T B:
/// B = L^{k/2} P for even k and B = C L^{(k-1)/2} P for odd k, C being the
/// weighted incidence matrix. Rayleigh quotients formed as |Bx|^2 keep full
/// relative accuracy for the tiny eigenvalues that appear at large k, where
/// x^T (L^k x) does not.
class RestrictedPowerOperator {
 public:
  RestrictedPowerOperator(const Graph& graph, std::span<const Index> s_complement,
                          int k)
      : graph_(&graph), nodes_(s_complement.begin(), s_complement.end()), k_(k) {
    detail::validate_power(k);
    detail::validate_subset(graph, s_complement);
  }

  Index size() const { return static_cast<Index>(nodes_.size()); }
  int power() const { return k_; }
  const std::vector<Index>& nodes() const { return nodes_; }
  const Graph& graph() const { return *graph_; }

  GraphSignal embed(const Eigen::VectorXd& x) const {
    GraphSignal full = GraphSignal::Zero(graph_->size());
    for (Index a = 0; a < size(); ++a) full[nodes_[static_cast<std::size_t>(a)]] = x[a];
    return full;
  }

  Eigen::VectorXd restrict(const GraphSignal& full) const {
    Eigen::VectorXd x(size());
    for (Index a = 0; a < size(); ++a) x[a] = full[nodes_[static_cast<std::size_t>(a)]];
    return x;
  }

  /// B x.
  Eigen::VectorXd half(const Eigen::VectorXd& x) const {
    GraphSignal full = laplacian_power_apply(*graph_, embed(x), k_ / 2);
    if (k_ % 2 == 1) return incidence_apply(*graph_, full);
    return full;
  }

  /// B^T y.
  Eigen::VectorXd half_transpose(const Eigen::VectorXd& y) const {
    GraphSignal full = (k_ % 2 == 1) ? incidence_transpose_apply(*graph_, y) : y;
    return restrict(laplacian_power_apply(*graph_, full, k_ / 2));
  }

  /// (L^k)_{Sc} x: embed, k products with L, restrict.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    detail::require(x.size() == size(), "vector length does not match |Sc|");
    return restrict(laplacian_power_apply(*graph_, embed(x), k_));
  }

 private:
  const Graph* graph_;
  std::vector<Index> nodes_;
  int k_;
};

inline Eigen::VectorXd restricted_operator_apply(const Graph& graph,
                                                 std::span<const Index> s_complement,
                                                 int k, const Eigen::VectorXd& x) {
  return RestrictedPowerOperator(graph, s_complement, k).apply(x);
}

namespace detail {

// Applies (P^T L P)^{-k}. P^T L P is the Laplacian with Dirichlet conditions
// on S; it is positive definite when the graph is connected and S is not
// empty. (L^k)_{Sc} differs from (P^T L P)^k by a term of rank at most
// (k-1)|S|, so this preconditioner leaves only a few outlying eigenvalues.
class DirichletPreconditioner {
 public:
  DirichletPreconditioner(const Graph& graph, std::span<const Index> nodes, int k)
      : k_(k) {
    std::vector<Index> position(static_cast<std::size_t>(graph.size()), -1);
    for (std::size_t a = 0; a < nodes.size(); ++a)
      position[static_cast<std::size_t>(nodes[a])] = static_cast<Index>(a);
    const auto& s = graph.inv_sqrt_degrees();
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      const Index i = nodes[a];
      entries.emplace_back(static_cast<Index>(a), static_cast<Index>(a), 1.0);
      graph.for_each_neighbor(i, [&](Index j, double w) {
        const Index b = position[static_cast<std::size_t>(j)];
        if (b >= 0) entries.emplace_back(static_cast<Index>(a), b, -w * s[i] * s[j]);
      });
    }
    Eigen::SparseMatrix<double> m(static_cast<Index>(nodes.size()),
                                  static_cast<Index>(nodes.size()));
    m.setFromTriplets(entries.begin(), entries.end());
    factor_.compute(m);
    if (factor_.info() != Eigen::Success)
      throw NumericalError("factorization of the restricted Laplacian failed");
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const {
    Eigen::VectorXd z = r;
    for (int step = 0; step < k_; ++step) z = factor_.solve(z);
    return z;
  }

 private:
  int k_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

// Appends the columns of `candidates` to the orthonormal set `basis`
// (classical Gram-Schmidt, applied twice), dropping near-dependent columns.
inline Eigen::MatrixXd extend_orthonormal(const Eigen::MatrixXd& basis,
                                          const Eigen::MatrixXd& candidates) {
  Eigen::MatrixXd out(basis.rows(), basis.cols() + candidates.cols());
  out.leftCols(basis.cols()) = basis;
  Index count = basis.cols();
  for (Index c = 0; c < candidates.cols(); ++c) {
    Eigen::VectorXd v = candidates.col(c);
    const double original = v.norm();
    if (!(original > 0.0) || !std::isfinite(original)) continue;
    v /= original;
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = out.leftCols(count);
      v -= q * (q.transpose() * v);
    }
    const double norm = v.norm();
    if (norm < 1e-10) continue;
    out.col(count++) = v / norm;
  }
  return out.leftCols(count);
}

}  // namespace detail

namespace detail {

// Approximate solve of (L^k)_{Sc} w = r by conjugate gradients preconditioned
// with (P^T L P)^{-k}. The outlying eigenvalues of the preconditioned operator
// all sit at or above 1, so a few steps remove most of the error.
inline Eigen::VectorXd inner_solve(const RestrictedPowerOperator& op,
                                   const DirichletPreconditioner& preconditioner,
                                   const Eigen::VectorXd& rhs, double tol, int max_steps) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z = preconditioner.apply(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double target = tol * rhs.norm();
  for (int step = 0; step < max_steps && rz > 0.0; ++step) {
    const Eigen::VectorXd ap = op.apply(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0)) break;
    const double alpha = rz / curvature;
    w += alpha * p;
    r -= alpha * ap;
    if (r.norm() <= target) break;
    z = preconditioner.apply(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return w;
}

// Cholesky factor of the dense (L^k)_{Sc} + tau I. Rounding makes the
// assembled matrix useless for the eigenvalue itself at large k, but as an
// approximate inverse it turns LOBPCG into a shifted inverse iteration.
class DenseShiftPreconditioner {
 public:
  DenseShiftPreconditioner(const Eigen::MatrixXd& power, const std::vector<Index>& nodes) {
    const Index m = static_cast<Index>(nodes.size());
    Eigen::MatrixXd a(m, m);
    for (Index c = 0; c < m; ++c)
      for (Index r = 0; r < m; ++r)
        a(r, c) = power(nodes[static_cast<std::size_t>(r)], nodes[static_cast<std::size_t>(c)]);
    const double scale = a.diagonal().maxCoeff();
    for (double shift = 1e-13 * scale; shift < scale; shift *= 100.0) {
      Eigen::MatrixXd shifted = a;
      shifted.diagonal().array() += shift;
      factor_.compute(shifted);
      if (factor_.info() == Eigen::Success) return;
    }
    throw NumericalError("Cholesky factorization of the shifted restricted power failed");
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& r) const { return factor_.solve(r); }

 private:
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

// Dense L^k, built column by column with sparse products.
inline Eigen::MatrixXd dense_laplacian_power(const Graph& graph, int k) {
  const Index n = graph.size();
  Eigen::MatrixXd out(n, n);
  GraphSignal e = GraphSignal::Zero(n);
  for (Index c = 0; c < n; ++c) {
    e[c] = 1.0;
    out.col(c) = laplacian_power_apply(graph, e, k);
    e[c] = 0.0;
  }
  return 0.5 * (out + out.transpose());
}

// Block LOBPCG for the smallest eigenpair of op. `precondition` maps a block
// of residuals to a block of search directions.
template <typename Precondition>
EigenPair lobpcg_smallest(const RestrictedPowerOperator& op, const SolverConfig& config,
                          const Eigen::VectorXd& initial, Precondition&& precondition) {
  const Index m = op.size();
  const Index block = std::min<Index>(config.block_size, m);
  constexpr int kStallLimit = 8;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::MatrixXd start(m, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < m; ++i) start(i, j) = uniform(rng);
  if (initial.size() != 0) {
    require(initial.size() == m, "initial vector length does not match |Sc|");
    start.col(0) = initial;
  }

  auto half_block = [&](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out;
    for (Index j = 0; j < v.cols(); ++j) {
      Eigen::VectorXd col = op.half(v.col(j));
      if (j == 0) out.resize(col.size(), v.cols());
      out.col(j) = col;
    }
    return out;
  };

  // Rayleigh-Ritz on an orthonormal basis: the right singular vectors of B*basis
  // for the smallest singular values are the Ritz coefficients.
  struct Ritz {
    Eigen::MatrixXd coefficients;
    Eigen::VectorXd values;
  };
  auto rayleigh_ritz = [&](const Eigen::MatrixXd& half_basis, Index count) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(half_basis, Eigen::ComputeThinV);
    const Index dim = half_basis.cols();
    Ritz ritz{Eigen::MatrixXd(dim, count), Eigen::VectorXd(count)};
    for (Index j = 0; j < count; ++j) {
      const Index src = dim - 1 - j;
      ritz.coefficients.col(j) = svd.matrixV().col(src);
      ritz.values[j] = svd.singularValues()[src] * svd.singularValues()[src];
    }
    return ritz;
  };

  Eigen::MatrixXd x = extend_orthonormal(Eigen::MatrixXd(m, 0), start);
  Eigen::MatrixXd hx = half_block(x);
  Index cols = x.cols();
  Eigen::VectorXd theta;
  {
    Ritz ritz = rayleigh_ritz(hx, cols);
    x = x * ritz.coefficients;
    hx = hx * ritz.coefficients;
    theta = ritz.values;
  }

  Eigen::MatrixXd p(m, 0);
  double residual = 0.0;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    Eigen::MatrixXd r(m, cols);
    for (Index j = 0; j < cols; ++j)
      r.col(j) = op.half_transpose(hx.col(j)) - theta[j] * x.col(j);
    residual = r.col(0).norm();
    const double value = theta[0];
    const double gap = cols > 1 ? theta[1] - theta[0] : value;
    if (residual < 0.5 * best) {
      best = residual;
      stalled = 0;
    } else {
      ++stalled;
    }
    const bool converged = residual <= config.tol * gap &&
                           residual * residual <= config.tol * value * gap;
    const bool floor_reached =
        stalled >= kStallLimit && residual <= config.tol * std::max(1.0, value);
    if (converged || floor_reached) {
      EigenPair pair;
      pair.vector = x.col(0).normalized();
      fix_sign(pair.vector);
      pair.value = op.half(pair.vector).squaredNorm();
      pair.residual = residual;
      pair.iterations = iter;
      return pair;
    }

    const Eigen::MatrixXd w = precondition(r);
    Eigen::MatrixXd basis = extend_orthonormal(x, w);
    const Index x_cols = x.cols();
    basis = extend_orthonormal(basis, p);
    Eigen::MatrixXd hbasis(hx.rows(), basis.cols());
    hbasis.leftCols(x_cols) = hx;
    if (basis.cols() > x_cols)
      hbasis.rightCols(basis.cols() - x_cols) =
          half_block(basis.rightCols(basis.cols() - x_cols));

    const Index keep = std::min<Index>(cols, basis.cols());
    Ritz ritz = rayleigh_ritz(hbasis, keep);
    x = basis * ritz.coefficients;
    hx = hbasis * ritz.coefficients;
    if (basis.cols() > x_cols)
      p = basis.rightCols(basis.cols() - x_cols) *
          ritz.coefficients.bottomRows(basis.cols() - x_cols);
    else
      p.resize(m, 0);
    cols = keep;
    theta = ritz.values;
  }
  throw ConvergenceError("restricted eigen-solve did not converge in " +
                             std::to_string(config.max_iters) + " iterations",
                         residual);
}

}  // namespace detail

/// Graphs up to this size use the dense shifted-Cholesky preconditioner.
inline constexpr Index kDensePreconditionLimit = 2500;

/// Smallest eigen-pair of (L^k)_{Sc} by preconditioned block LOBPCG, for one
/// graph and power and any number of node subsets.
///
/// Rayleigh-Ritz is done through a thin SVD of the factor B applied to the
/// search basis. With gap the distance to the second Ritz value, the
/// iteration stops once |r| <= tol * gap (vector accurate to about tol) and
/// |r|^2 <= tol * value * gap (value accurate to about tol, relative). When
/// rounding keeps the residual from getting there (tiny values at large k),
/// the iteration stops once the residual has stopped improving and
/// |r| <= tol * max(1, value).
///
/// Up to kDensePreconditionLimit nodes the preconditioner is the Cholesky
/// factor of the shifted dense restriction of L^k, which is assembled once
/// per solver. Larger graphs use an inner conjugate-gradient solve
/// preconditioned by the k-th power of the inverse Dirichlet Laplacian, so
/// only sparse matrices are ever formed.
class RestrictedEigenSolver {
 public:
  RestrictedEigenSolver(const Graph& graph, int k, SolverConfig config = {})
      : graph_(&graph), k_(k), config_(config) {
    detail::validate_power(k);
    detail::require(config.tol > 0.0 && config.tol < 1.0,
                    "solver tolerance must lie in (0, 1)");
    detail::require(config.max_iters >= 1, "solver needs at least one iteration");
    detail::require(config.block_size >= 2, "solver block size must be at least 2");
    detail::require(graph.connected(), "eigen-solve requires a connected graph");
    if (graph.size() <= kDensePreconditionLimit)
      power_ = detail::dense_laplacian_power(graph, k);
  }

  int power() const { return k_; }
  const SolverConfig& config() const { return config_; }

  /// Sc = V has the exact answer value 0, v = D^{1/2} 1 / |D^{1/2} 1|. A
  /// nonempty `initial` (length |Sc|) replaces the first random start column.
  EigenPair solve(std::span<const Index> s_complement,
                  const Eigen::VectorXd& initial = {}) const {
    const RestrictedPowerOperator op(*graph_, s_complement, k_);
    const Index m = op.size();
    if (m == graph_->size()) {
      EigenPair pair;
      pair.vector = graph_->degrees().cwiseSqrt().normalized();
      pair.value = 0.0;
      pair.residual = op.apply(pair.vector).norm();
      return pair;
    }
    if (m == 1) {
      EigenPair pair;
      pair.vector = Eigen::VectorXd::Ones(1);
      pair.value = op.half(pair.vector).squaredNorm();
      return pair;
    }

    if (graph_->size() <= kDensePreconditionLimit) {
      const detail::DenseShiftPreconditioner preconditioner(power_, op.nodes());
      return detail::lobpcg_smallest(
          op, config_, initial,
          [&](const Eigen::MatrixXd& r) -> Eigen::MatrixXd { return preconditioner.apply(r); });
    }

    constexpr double kInnerTol = 1e-2;
    constexpr int kInnerSteps = 50;
    const detail::DirichletPreconditioner preconditioner(*graph_, op.nodes(), k_);
    return detail::lobpcg_smallest(op, config_, initial, [&](const Eigen::MatrixXd& r) {
      Eigen::MatrixXd w(r.rows(), r.cols());
      for (Index j = 0; j < r.cols(); ++j)
        w.col(j) = detail::inner_solve(op, preconditioner, r.col(j), kInnerTol, kInnerSteps);
      return w;
    });
  }

 private:
  const Graph* graph_;
  int k_;
  SolverConfig config_;
  Eigen::MatrixXd power_;  // dense L^k, small graphs only
};

inline EigenPair smallest_eigenpair_restricted(const Graph& graph,
                                               std::span<const Index> s_complement,
                                               int k, const SolverConfig& config = {},
                                               const Eigen::VectorXd& initial = {}) {
  return RestrictedEigenSolver(graph, k, config).solve(s_complement, initial);
}

/// Dense oracle: assembles the factor B of (L^k)_{Sc} explicitly from the
/// dense Laplacian and takes its smallest right singular pair.
inline EigenPair dense_restricted_eigenpair(const Graph& graph,
                                            std::span<const Index> s_complement,
                                            int k, Index limit = kDefaultOracleLimit) {
  detail::validate_power(k);
  detail::validate_subset(graph, s_complement);
  const Index m = static_cast<Index>(s_complement.size());
  if (m > limit) throw SizeLimitError(m, limit);
  const Index n = graph.size();
  if (n > limit) throw SizeLimitError(n, limit);

  const Eigen::MatrixXd l = dense_laplacian(graph, limit);
  Eigen::MatrixXd half_power = Eigen::MatrixXd::Identity(n, n);
  for (int step = 0; step < k / 2; ++step) half_power = l * half_power;
  Eigen::MatrixXd factor(n, m);
  for (Index a = 0; a < m; ++a) factor.col(a) = half_power.col(s_complement[static_cast<std::size_t>(a)]);
  if (k % 2 == 1) {
    const auto edges = graph.edges();
    const auto& s = graph.inv_sqrt_degrees();
    Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(static_cast<Index>(edges.size()), n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double root = std::sqrt(edges[e].w);
      incidence(static_cast<Index>(e), edges[e].u) = root * s[edges[e].u];
      incidence(static_cast<Index>(e), edges[e].v) = -root * s[edges[e].v];
    }
    factor = incidence * factor;
  }

  EigenPair pair;
  if (factor.rows() < m) {
    // Fewer rows than unknowns: the factor has a null space.
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(m, m);
    padded.topRows(factor.rows()) = factor;
    factor.swap(padded);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(factor, Eigen::ComputeThinV);
  const Index last = svd.singularValues().size() - 1;
  pair.vector = svd.matrixV().col(last);
  fix_sign(pair.vector);
  pair.value = svd.singularValues()[last] * svd.singularValues()[last];
  const Eigen::MatrixXd& b = factor;
  pair.residual = (b.transpose() * (b * pair.vector) - pair.value * pair.vector).norm();
  return pair;
}

}  // namespace gsamp
