#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gsamp {

using Index = Eigen::Index;

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: malformed files, violated preconditions, bad parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Graph has a node with no incident edges.
class IsolatedNodeError : public ConfigError {
 public:
  explicit IsolatedNodeError(Index node)
      : ConfigError("node " + std::to_string(node) +
                    " has no incident edges (graph must be connected)"),
        node_(node) {}
  Index node() const { return node_; }

 private:
  Index node_;
};

/// Graph has more than one connected component.
class DisconnectedGraphError : public ConfigError {
 public:
  DisconnectedGraphError(Index components, const std::string& hint = {})
      : ConfigError("graph has " + std::to_string(components) +
                    " connected components; a connected graph is required" +
                    (hint.empty() ? std::string{} : " (" + hint + ")")),
        components_(components) {}
  Index components() const { return components_; }

 private:
  Index components_;
};

/// Dense oracle refused because the problem exceeds the configured size.
class SizeLimitError : public ConfigError {
 public:
  SizeLimitError(Index n, Index limit)
      : ConfigError("dense computation refused: size " + std::to_string(n) +
                    " exceeds oracle limit " + std::to_string(limit)) {}
};

/// A numerical procedure failed (non-convergence, rank deficiency).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : NumericalError(what + " (last residual " + format_residual(last_residual) + ")"),
        last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  static std::string format_residual(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", r);
    return buf;
  }

  double last_residual_;
};

/// Sampled rows of the bandlimited basis do not determine the coefficients.
class RankDeficientError : public NumericalError {
 public:
  RankDeficientError(Index rank, Index columns)
      : NumericalError("sampled basis U(S,K) has rank " + std::to_string(rank) +
                       " < " + std::to_string(columns) +
                       " columns; the bandlimited signal is not uniquely "
                       "determined by the samples"),
        rank_(rank),
        columns_(columns) {}
  Index rank() const { return rank_; }
  Index columns() const { return columns_; }

 private:
  Index rank_;
  Index columns_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace detail

}  // namespace gsamp
