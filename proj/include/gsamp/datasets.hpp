#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "gsamp/knn_graph.hpp"

namespace gsamp {

/// Feature rows with an integer class id per row.
struct LabeledFeatures {
  FeatureMatrix features;
  std::vector<int> labels;
};

/// Sparse document-term count matrix as (doc, term, count) triplets.
struct TermCounts {
  struct Entry {
    Index doc = 0;
    Index term = 0;
    double count = 0.0;
  };
  Index documents = 0;
  Index terms = 0;
  std::vector<Entry> entries;
};

struct TfidfFeatures {
  FeatureMatrix features;
  std::vector<Index> vocabulary;  // original term id of each feature column
};

/// tf-idf with (1 + ln tf) * ln(N / df). Terms in fewer than `min_doc_freq`
/// documents are dropped; of the rest the `vocab_cap` with the largest total
/// count are kept (ties to the lower term id), in ascending term-id order.
inline TfidfFeatures tfidf_features(const TermCounts& counts, Index min_doc_freq,
                                    Index vocab_cap) {
  detail::require(counts.documents >= 1, "term counts need at least one document");
  detail::require(vocab_cap >= 1, "vocabulary cap must be positive");
  std::vector<std::vector<std::pair<Index, double>>> rows(
      static_cast<std::size_t>(counts.documents));
  std::vector<Index> doc_freq(static_cast<std::size_t>(counts.terms), 0);
  std::vector<double> total(static_cast<std::size_t>(counts.terms), 0.0);
  for (const auto& e : counts.entries) {
    if (e.doc < 0 || e.doc >= counts.documents || e.term < 0 || e.term >= counts.terms)
      throw ConfigError("term count (" + std::to_string(e.doc) + ", " +
                        std::to_string(e.term) + ") out of range");
    if (!(e.count >= 0.0) || e.count != std::floor(e.count))
      throw ConfigError("term counts must be nonnegative integers");
    if (e.count == 0.0) continue;
    rows[static_cast<std::size_t>(e.doc)].emplace_back(e.term, e.count);
  }
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    // Merge repeated (doc, term) entries.
    std::vector<std::pair<Index, double>> merged;
    for (const auto& [t, c] : row) {
      if (!merged.empty() && merged.back().first == t)
        merged.back().second += c;
      else
        merged.emplace_back(t, c);
    }
    row.swap(merged);
    for (const auto& [t, c] : row) {
      ++doc_freq[static_cast<std::size_t>(t)];
      total[static_cast<std::size_t>(t)] += c;
    }
  }

  std::vector<Index> candidates;
  for (Index t = 0; t < counts.terms; ++t)
    if (doc_freq[static_cast<std::size_t>(t)] >= std::max<Index>(min_doc_freq, 1))
      candidates.push_back(t);
  std::stable_sort(candidates.begin(), candidates.end(), [&](Index a, Index b) {
    return total[static_cast<std::size_t>(a)] > total[static_cast<std::size_t>(b)];
  });
  if (static_cast<Index>(candidates.size()) > vocab_cap)
    candidates.resize(static_cast<std::size_t>(vocab_cap));
  std::sort(candidates.begin(), candidates.end());

  std::vector<Index> column(static_cast<std::size_t>(counts.terms), -1);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    column[static_cast<std::size_t>(candidates[c])] = static_cast<Index>(c);

  TfidfFeatures out;
  out.vocabulary = candidates;
  out.features = FeatureMatrix::Zero(counts.documents, static_cast<Index>(candidates.size()));
  const double n_docs = static_cast<double>(counts.documents);
  for (Index d = 0; d < counts.documents; ++d)
    for (const auto& [t, tf] : rows[static_cast<std::size_t>(d)]) {
      const Index c = column[static_cast<std::size_t>(t)];
      if (c < 0) continue;
      const double df = static_cast<double>(doc_freq[static_cast<std::size_t>(t)]);
      out.features(d, c) = (1.0 + std::log(tf)) * std::log(n_docs / df);
    }
  return out;
}

/// Two concentric circles, points uniformly spaced in angle with Gaussian
/// radial noise. Rows [0, n) lie on the first circle (label 0), the rest on
/// the second (label 1).
inline LabeledFeatures make_two_circles(Index n_per_circle,
                                        std::pair<double, double> radii,
                                        double noise, std::uint64_t seed) {
  detail::require(n_per_circle >= 1, "need at least one point per circle");
  detail::require(radii.first > 0.0 && radii.second > 0.0 && radii.first != radii.second,
                  "circle radii must be positive and distinct");
  detail::require(noise >= 0.0, "noise must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LabeledFeatures out;
  out.features.resize(2 * n_per_circle, 2);
  out.labels.resize(static_cast<std::size_t>(2 * n_per_circle));
  for (int circle = 0; circle < 2; ++circle) {
    const double radius = circle == 0 ? radii.first : radii.second;
    for (Index t = 0; t < n_per_circle; ++t) {
      const Index row = circle * n_per_circle + t;
      const double angle =
          2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n_per_circle);
      const double r = noise > 0.0 ? radius + noise * gauss(rng) : radius;
      out.features(row, 0) = r * std::cos(angle);
      out.features(row, 1) = r * std::sin(angle);
      out.labels[static_cast<std::size_t>(row)] = circle;
    }
  }
  return out;
}

/// Isotropic Gaussian clusters. Class centers are drawn uniformly from
/// [-center_box, center_box]^dim; rows are grouped by class.
inline LabeledFeatures make_gaussian_blobs(Index n_per_class, int classes, Index dim,
                                           double center_box, double cluster_std,
                                           std::uint64_t seed) {
  detail::require(n_per_class >= 1 && classes >= 1 && dim >= 1,
                  "blob sizes must be positive");
  detail::require(cluster_std > 0.0 && center_box >= 0.0, "blob spreads must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-center_box, center_box);
  std::normal_distribution<double> gauss(0.0, cluster_std);
  Eigen::MatrixXd centers(classes, dim);
  for (int c = 0; c < classes; ++c)
    for (Index d = 0; d < dim; ++d) centers(c, d) = uniform(rng);
  LabeledFeatures out;
  out.features.resize(n_per_class * classes, dim);
  out.labels.resize(static_cast<std::size_t>(n_per_class * classes));
  for (int c = 0; c < classes; ++c)
    for (Index t = 0; t < n_per_class; ++t) {
      const Index row = c * n_per_class + t;
      for (Index d = 0; d < dim; ++d) out.features(row, d) = centers(c, d) + gauss(rng);
      out.labels[static_cast<std::size_t>(row)] = c;
    }
  return out;
}

}  // namespace gsamp
