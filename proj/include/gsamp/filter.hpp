#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gsamp/spectral_basis.hpp"

namespace gsamp {

enum class KernelKind { ideal, sigmoid, polynomial };

inline constexpr int kDefaultFilterDegree = 10;
inline constexpr double kDefaultSigmoidAlpha = 8.0;
inline constexpr int kChebyshevGrid = 1000;

/// Spectral response h(lambda) on [0, 2].
///
/// Polynomial kernels keep their Chebyshev coefficients c_j in the shifted
/// variable t = lambda - 1, so h(lambda) = sum_j c_j T_j(lambda - 1), and the
/// same polynomial expanded in powers of lambda (`monomial`). `approx_error`
/// is the measured max deviation from the source kernel on a uniform grid
/// (0 when built directly from coefficients).
struct SpectralKernel {
  KernelKind kind = KernelKind::ideal;
  double omega = 1.0;
  double alpha = kDefaultSigmoidAlpha;
  int degree = 0;
  std::vector<double> chebyshev;
  std::vector<double> monomial;
  double approx_error = 0.0;

  double operator()(double lambda) const {
    switch (kind) {
      case KernelKind::ideal:
        return lambda < omega ? 1.0 : 0.0;
      case KernelKind::sigmoid:
        return 1.0 / (1.0 + std::exp(alpha * (lambda - omega)));
      case KernelKind::polynomial:
        break;
    }
    // Clenshaw recurrence.
    const double t = lambda - 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t j = chebyshev.size(); j-- > 1;) {
      const double b0 = chebyshev[j] + 2.0 * t * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return (chebyshev.empty() ? 0.0 : chebyshev[0]) + t * b1 - b2;
  }
};

inline SpectralKernel ideal_kernel(double omega) {
  if (!(omega > 0.0 && omega <= 2.0))
    throw ConfigError("ideal kernel cutoff must lie in (0, 2], got " + std::to_string(omega));
  SpectralKernel h;
  h.kind = KernelKind::ideal;
  h.omega = omega;
  return h;
}

inline SpectralKernel sigmoid_kernel(double omega, double alpha = kDefaultSigmoidAlpha) {
  detail::require(std::isfinite(omega), "sigmoid cutoff must be finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("sigmoid steepness alpha must be positive");
  SpectralKernel h;
  h.kind = KernelKind::sigmoid;
  h.omega = omega;
  h.alpha = alpha;
  return h;
}

namespace detail {

// Powers-of-lambda coefficients of sum_j c_j T_j(lambda - 1).
inline std::vector<double> chebyshev_to_monomial(const std::vector<double>& c) {
  const std::size_t size = c.size();
  std::vector<double> out(size, 0.0);
  std::vector<double> prev(size, 0.0);  // T_{j-1}
  std::vector<double> cur(size, 0.0);   // T_j
  prev[0] = 1.0;
  if (size > 1) {
    cur[0] = -1.0;
    cur[1] = 1.0;
  }
  for (std::size_t j = 0; j < size; ++j) {
    const std::vector<double>& tj = j == 0 ? prev : cur;
    for (std::size_t i = 0; i < size; ++i) out[i] += c[j] * tj[i];
    if (j == 0) continue;
    // T_{j+1} = 2 (lambda - 1) T_j - T_{j-1}
    std::vector<double> next(size, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      next[i] -= 2.0 * cur[i] + prev[i];
      if (i + 1 < size) next[i + 1] += 2.0 * cur[i];
    }
    prev.swap(cur);
    cur.swap(next);
  }
  return out;
}

inline double grid_error(const SpectralKernel& source, const SpectralKernel& poly) {
  double worst = 0.0;
  for (int q = 0; q < kChebyshevGrid; ++q) {
    const double lambda = 2.0 * q / (kChebyshevGrid - 1);
    worst = std::max(worst, std::abs(source(lambda) - poly(lambda)));
  }
  return worst;
}

template <typename Fn>
std::vector<double> chebyshev_coefficients(Fn&& fn, int degree) {
  const int nodes = std::max(4 * degree, degree + 1);
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int q = 0; q < nodes; ++q) {
    const double theta = std::numbers::pi * (q + 0.5) / nodes;
    const double value = fn(1.0 + std::cos(theta));
    for (int j = 0; j <= degree; ++j)
      c[static_cast<std::size_t>(j)] += value * std::cos(j * theta);
  }
  for (int j = 0; j <= degree; ++j) c[static_cast<std::size_t>(j)] *= 2.0 / nodes;
  c[0] *= 0.5;
  return c;
}

}  // namespace detail

/// Kernel given by its coefficients in powers of lambda: sum_j a_j lambda^j.
inline SpectralKernel polynomial_kernel(const std::vector<double>& monomial) {
  detail::require(!monomial.empty(), "polynomial kernel needs at least one coefficient");
  SpectralKernel h;
  h.kind = KernelKind::polynomial;
  h.degree = static_cast<int>(monomial.size()) - 1;
  h.chebyshev = detail::chebyshev_coefficients(
      [&](double lambda) {
        double acc = 0.0;
        for (std::size_t j = monomial.size(); j-- > 0;) acc = acc * lambda + monomial[j];
        return acc;
      },
      std::max(h.degree, 1));
  h.chebyshev.resize(static_cast<std::size_t>(h.degree) + 1);
  h.monomial = monomial;
  return h;
}

/// Truncated Chebyshev expansion of degree p over [0, 2]. Coefficients come
/// from Gauss-Chebyshev quadrature with 4p nodes; the max error over a
/// 1000-point grid is stored in approx_error.
inline SpectralKernel chebyshev_approximate(const SpectralKernel& kernel, int degree) {
  detail::require(degree >= 1, "polynomial degree must be at least 1");
  if (kernel.kind == KernelKind::ideal)
    throw ConfigError(
        "the ideal kernel is discontinuous and has no useful polynomial approximation; "
        "approximate sigmoid_kernel(omega, alpha) instead");
  SpectralKernel h;
  h.kind = KernelKind::polynomial;
  h.omega = kernel.omega;
  h.alpha = kernel.alpha;
  h.degree = degree;
  h.chebyshev = detail::chebyshev_coefficients(kernel, degree);
  h.monomial = detail::chebyshev_to_monomial(h.chebyshev);
  h.approx_error = detail::grid_error(kernel, h);
  return h;
}

/// h(L) x for a polynomial kernel by the Chebyshev three-term recurrence in
/// L - I. Only matrix-vector products with L are used, so the output of an
/// impulse is exactly zero beyond `degree` hops.
inline GraphSignal apply_filter(const Graph& graph, const SpectralKernel& kernel,
                                const GraphSignal& x) {
  detail::require(kernel.kind == KernelKind::polynomial,
                  "apply_filter needs a polynomial kernel (see chebyshev_approximate)");
  detail::require_length(graph, x);
  const auto& c = kernel.chebyshev;
  GraphSignal prev = x;  // T_0 x
  GraphSignal y = c[0] * prev;
  if (c.size() == 1) return y;
  GraphSignal cur;
  detail::laplacian_apply_into(graph, prev, cur);
  cur -= prev;  // T_1 x
  y += c[1] * cur;
  GraphSignal next;
  for (std::size_t j = 2; j < c.size(); ++j) {
    detail::laplacian_apply_into(graph, cur, next);
    next -= cur;
    next = 2.0 * next - prev;
    y += c[j] * next;
    prev.swap(cur);
    cur.swap(next);
  }
  return y;
}

/// U diag(h(lambda)) U^T x.
inline GraphSignal apply_exact_filter(const SpectralBasis& basis, const SpectralKernel& kernel,
                                      const GraphSignal& x) {
  detail::require(x.size() == basis.size(), "signal length does not match basis");
  Eigen::VectorXd coeff = basis.eigenvectors.transpose() * x;
  for (Index i = 0; i < basis.size(); ++i) coeff[i] *= kernel(basis.eigenvalues[i]);
  return basis.eigenvectors * coeff;
}

}  // namespace gsamp
