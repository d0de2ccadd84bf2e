#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsamp/reconstruct.hpp"
#include "gsamp/sampling.hpp"

namespace gsamp {

/// Ground-truth class ids in {0, ..., classes-1}, revealed one node at a time.
class LabeledOracle {
 public:
  LabeledOracle(std::vector<int> labels, int classes)
      : labels_(std::move(labels)), classes_(classes) {
    detail::require(classes >= 1, "class count must be positive");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] < 0 || labels_[i] >= classes)
        throw ConfigError("label " + std::to_string(labels_[i]) + " of node " +
                          std::to_string(i) + " is outside [0, " +
                          std::to_string(classes) + ")");
  }
  /// Class count taken as 1 + the largest label.
  explicit LabeledOracle(std::vector<int> labels)
      : LabeledOracle(labels, labels.empty() ? 1 : 1 + *std::max_element(labels.begin(), labels.end())) {}

  int classes() const { return classes_; }
  Index size() const { return static_cast<Index>(labels_.size()); }
  int query(Index node) const {
    if (node < 0 || node >= size())
      throw ConfigError("no label for node " + std::to_string(node));
    ++queries_;
    return labels_[static_cast<std::size_t>(node)];
  }
  Index queries() const { return queries_; }
  const std::vector<int>& ground_truth() const { return labels_; }

 private:
  std::vector<int> labels_;
  int classes_;
  mutable Index queries_ = 0;
};

struct MembershipSamples {
  std::vector<SampledSignal> classes;  // one per class
  std::vector<std::string> warnings;
};

/// One-hot samples on S for every class. A class with no labeled node gets an
/// all-zero sample and a warning.
inline MembershipSamples membership_signals(const LabeledOracle& oracle,
                                            std::span<const Index> s) {
  detail::require(!s.empty(), "membership signals need a nonempty labeled set");
  complement(oracle.size(), s);
  MembershipSamples out;
  out.classes.resize(static_cast<std::size_t>(oracle.classes()));
  for (auto& c : out.classes) {
    c.nodes.assign(s.begin(), s.end());
    c.values = Eigen::VectorXd::Zero(static_cast<Index>(s.size()));
  }
  std::vector<int> seen(static_cast<std::size_t>(oracle.classes()), 0);
  for (std::size_t a = 0; a < s.size(); ++a) {
    const int label = oracle.query(s[a]);
    out.classes[static_cast<std::size_t>(label)].values[static_cast<Index>(a)] = 1.0;
    seen[static_cast<std::size_t>(label)] = 1;
  }
  for (int c = 0; c < oracle.classes(); ++c)
    if (!seen[static_cast<std::size_t>(c)])
      out.warnings.push_back("class " + std::to_string(c) +
                             " has no labeled node; its membership is predicted as zero");
  return out;
}

enum class ReconstructionMode { exact, pocs };

struct PredictConfig {
  ReconstructionMode mode = ReconstructionMode::pocs;
  std::optional<double> omega;  // defaults to the cutoff recorded in the set
  PocsConfig pocs;
};

struct MembershipPrediction {
  Eigen::MatrixXd scores;  // n x C
  std::vector<int> predicted;
  std::vector<std::string> warnings;
  bool converged = true;  // every POCS run met its tolerance
};

/// Index of the row maximum; ties go to the lowest class id.
inline int argmax_row(const Eigen::MatrixXd& scores, Index row) {
  int best = 0;
  for (Index c = 1; c < scores.cols(); ++c)
    if (scores(row, c) > scores(row, best)) best = static_cast<int>(c);
  return best;
}

/// Reconstructs every class membership from its samples on S and predicts
/// argmax per node. Both paths return reconstructions that agree with the
/// samples on S, so labeled nodes predict their queried class. The exact
/// path needs `basis`.
inline MembershipPrediction predict(const Graph& graph, const SamplingSet& set,
                                    const LabeledOracle& oracle, const PredictConfig& config = {},
                                    const SpectralBasis* basis = nullptr) {
  detail::require(oracle.size() == graph.size(), "label count does not match the graph");
  const double omega = config.omega ? *config.omega : set.cutoff();
  if (!(omega > 0.0))
    throw ConfigError("reconstruction cutoff omega must be positive; select a nonempty set "
                      "with recorded cutoffs or pass omega explicitly");
  const MembershipSamples samples = membership_signals(oracle, set.nodes);
  MembershipPrediction out;
  out.warnings = samples.warnings;
  out.scores.resize(graph.size(), oracle.classes());
  for (int c = 0; c < oracle.classes(); ++c) {
    const SampledSignal& sc = samples.classes[static_cast<std::size_t>(c)];
    GraphSignal f;
    if (sc.values.isZero(0.0)) {
      f = GraphSignal::Zero(graph.size());
    } else if (config.mode == ReconstructionMode::exact) {
      detail::require(basis != nullptr, "exact reconstruction needs the spectral basis");
      f = least_squares_reconstruct(*basis, sc, omega);
      detail::reset_samples(f, sc);
    } else {
      PocsResult r = pocs_reconstruct(graph, sc, omega, config.pocs);
      out.converged = out.converged && r.converged;
      f = std::move(r.signal);
    }
    out.scores.col(c) = f;
  }
  out.predicted.resize(static_cast<std::size_t>(graph.size()));
  for (Index i = 0; i < graph.size(); ++i)
    out.predicted[static_cast<std::size_t>(i)] = argmax_row(out.scores, i);
  return out;
}

/// Fraction of nodes outside S whose prediction matches the ground truth.
inline double unlabeled_accuracy(const std::vector<int>& predicted,
                                 const std::vector<int>& truth, std::span<const Index> s) {
  detail::require(predicted.size() == truth.size(), "prediction and label counts differ");
  const std::vector<Index> unlabeled = complement(static_cast<Index>(truth.size()), s);
  detail::require(!unlabeled.empty(), "no unlabeled node to score");
  Index correct = 0;
  for (Index i : unlabeled)
    if (predicted[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(i)]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(unlabeled.size());
}

/// Cumulative share of the energy of f in GFT coefficients up to each
/// eigenvalue.
struct EnergyCurve {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd cumulative;
};

inline EnergyCurve gft_energy_cdf(const SpectralBasis& basis, const GraphSignal& f) {
  const double total = f.squaredNorm();
  if (!(total > 0.0)) throw ConfigError("energy curve of the zero signal is undefined");
  const Eigen::VectorXd coeff = gft(basis, f);
  EnergyCurve out{basis.eigenvalues, Eigen::VectorXd(basis.size())};
  // Normalizing by the coefficient energy (equal to |f|^2 up to rounding)
  // makes the curve end at exactly 1.
  const double coeff_total = coeff.squaredNorm();
  double acc = 0.0;
  for (Index i = 0; i < basis.size(); ++i) {
    acc += coeff[i] * coeff[i];
    out.cumulative[i] = std::min(acc / coeff_total, 1.0);
  }
  return out;
}

/// Energies below (kEnergyFloor * |f|)^2 are rounding noise and count as zero.
inline constexpr double kEnergyFloor = 1e-12;
inline constexpr double kGammaPastTop = 1e-9;

/// Smallest theta in {lambda_1, ..., lambda_N, lambda_N + 1e-9} whose
/// high-pass tail sum_{lambda_i >= theta} |<f, u_i>|^2 is at most delta^2.
inline double smoothness_gamma(const SpectralBasis& basis, const GraphSignal& f, double delta) {
  detail::require(delta >= 0.0, "delta must be nonnegative");
  const Eigen::VectorXd coeff = gft(basis, f);
  // The tail sums and |f|^2 differ by rounding, so comparisons allow a few
  // ulps of the total energy on top of the floor.
  const double slack =
      (kEnergyFloor * kEnergyFloor + 16.0 * std::numeric_limits<double>::epsilon()) *
      f.squaredNorm();
  const Index n = basis.size();
  // tail[i] = energy at eigen-indices >= i
  std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
  for (Index i = n; i-- > 0;)
    tail[static_cast<std::size_t>(i)] = tail[static_cast<std::size_t>(i) + 1] + coeff[i] * coeff[i];
  for (Index i = 0; i < n; ++i) {
    const double theta = basis.eigenvalues[i];
    // Eigenvalues equal to theta belong to the tail.
    Index first = i;
    while (first > 0 && basis.eigenvalues[first - 1] >= theta) --first;
    if (tail[static_cast<std::size_t>(first)] <= delta * delta + slack) return theta;
  }
  return basis.eigenvalues[n - 1] + kGammaPastTop;
}

/// Count of eigenvalues strictly below smoothness_gamma(f, delta).
inline Index min_labels_lower_bound(const SpectralBasis& basis, const GraphSignal& f,
                                    double delta) {
  const double gamma = smoothness_gamma(basis, f, delta);
  Index count = 0;
  for (Index i = 0; i < basis.size(); ++i)
    if (basis.eigenvalues[i] < gamma) ++count;
  return count;
}

}  // namespace gsamp
