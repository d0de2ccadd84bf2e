#include <cmath>
#include <vector>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "gsamp/sampling.hpp"
#include "support/random_graphs.hpp"

namespace gsamp {
namespace {

Graph two_nodes() {
  const std::vector<Edge> e{{0, 1, 1.0}};
  return Graph::from_edges(2, e);
}

Graph complete(Index n) {
  std::vector<Edge> e;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v) e.push_back({u, v, 1.0});
  return Graph::from_edges(n, e);
}

Graph star(Index leaves) {
  std::vector<Edge> e;
  for (Index v = 1; v <= leaves; ++v) e.push_back({0, v, 1.0});
  return Graph::from_edges(leaves + 1, e);
}

// Smallest lambda_j such that some nonzero f in span{u_1..u_j} vanishes on S.
double true_cutoff(const SpectralBasis& b, const std::vector<Index>& s) {
  for (Index j = 1; j <= b.size(); ++j) {
    Eigen::MatrixXd rows(static_cast<Index>(s.size()), j);
    for (std::size_t a = 0; a < s.size(); ++a) rows.row(static_cast<Index>(a)) = b.eigenvectors.row(s[a]).head(j);
    Index rank = 0;
    if (!s.empty()) {
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
      for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-9) ++rank;
    }
    if (rank < j) return b.eigenvalues[j - 1];
  }
  return b.eigenvalues[b.size() - 1];
}

TEST(BandwidthEstimate, TwoNodeWorkedExample) {
  const Graph g = two_nodes();
  const Eigen::Vector2d phi(0, 1);
  EXPECT_NEAR(bandwidth_estimate(g, phi, 1), 1.0, 1e-15);
  EXPECT_NEAR(bandwidth_estimate(g, phi, 2), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(bandwidth_estimate(g, phi, 4), std::pow(2.0, 0.75), 1e-15);
  EXPECT_NEAR(bandwidth_estimate(g, -3.5 * phi, 4), std::pow(2.0, 0.75), 1e-15);
  EXPECT_THROW(bandwidth_estimate(g, Eigen::Vector2d::Zero(), 1), ConfigError);
}

TEST(BandwidthEstimate, EigenvectorGivesItsEigenvalue) {
  const Graph g = testing::random_connected_graph(20, 0.2, 2);
  const SpectralBasis b = dense_spectral_basis(g);
  for (Index i = 1; i < b.size(); ++i)
    for (int k : {1, 2, 3, 8})
      EXPECT_NEAR(bandwidth_estimate(g, b.eigenvectors.col(i), k), b.eigenvalues[i], 1e-9);
}

TEST(EstimateCutoff, TwoNodeOrdering) {
  const Graph g = two_nodes();
  const std::vector<Index> s{0};
  const double o1 = estimate_cutoff(g, s, 1).bandwidth_estimate;
  const double o2 = estimate_cutoff(g, s, 2).bandwidth_estimate;
  const double o4 = estimate_cutoff(g, s, 4).bandwidth_estimate;
  EXPECT_NEAR(o1, 1.0, 1e-12);
  EXPECT_NEAR(o2, std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(o4, std::pow(2.0, 0.75), 1e-9);
  EXPECT_LT(o1, o2);
  EXPECT_LT(o2, o4);
  EXPECT_LT(o4, 2.0);
}

TEST(EstimateCutoff, SmoothestSignalContract) {
  const Graph g = testing::random_connected_graph(30, 0.1, 11);
  const auto s = testing::random_subset(30, 5, 12);
  const SmoothestSignal phi = estimate_cutoff(g, s, 4);
  for (Index i : s) EXPECT_EQ(phi.values[i], 0.0);
  EXPECT_NEAR(phi.values.norm(), 1.0, 1e-12);
  EXPECT_NEAR(phi.bandwidth_estimate, std::pow(phi.eigenvalue, 0.25), 1e-15);
  EXPECT_NEAR(bandwidth_estimate(g, phi.values, 4), phi.bandwidth_estimate, 1e-8);
}

TEST(EstimateCutoff, EmptyAndFullSets) {
  const Graph g = complete(3);
  const SmoothestSignal empty = estimate_cutoff(g, {}, 1);
  EXPECT_EQ(empty.bandwidth_estimate, 0.0);
  const std::vector<Index> all{0, 1, 2};
  EXPECT_THROW(estimate_cutoff(g, all, 1), ConfigError);
}

// Property: Omega_k(S) never exceeds the exact cutoff on small graphs.
TEST(EstimateCutoff, BelowExhaustiveCutoffOnSmallGraphs) {
  for (std::uint64_t t = 0; t < 60; ++t) {
    const Index n = 3 + static_cast<Index>(t % 6);
    const Graph g = testing::random_connected_graph(n, 0.4, 500 + t);
    const SpectralBasis b = dense_spectral_basis(g);
    const auto s = testing::random_subset(n, 1 + static_cast<Index>(t % static_cast<std::uint64_t>(n - 1)), 600 + t);
    const double wc = true_cutoff(b, s);
    for (int k : {1, 2, 4})
      EXPECT_LE(estimate_cutoff(g, s, k).bandwidth_estimate, wc + 1e-9)
          << "instance " << t << " k " << k;
  }
}

TEST(Greedy, TwoNodeTieBreak) {
  const SamplingSet set = greedy_select(two_nodes(), 1, 1);
  EXPECT_EQ(set.nodes, std::vector<Index>{0});
  ASSERT_EQ(set.cutoffs.size(), 1u);
  EXPECT_NEAR(set.cutoffs[0], 1.0, 1e-12);
}

TEST(Greedy, StarPicksTheHubLikeBruteForce) {
  const Graph g = star(5);
  Index best = -1;
  double best_value = -1.0;
  for (Index v = 0; v < 6; ++v) {
    const std::vector<Index> s{v};
    const double o = dense_restricted_eigenpair(g, complement(6, s), 1).value;
    if (o > best_value + 1e-12) {
      best_value = o;
      best = v;
    }
  }
  EXPECT_EQ(best, 0);
  EXPECT_EQ(greedy_select(g, 1, 1).nodes, std::vector<Index>{0});
}

// Each step adds the argmax of phi^2 computed independently by the dense oracle.
TEST(Greedy, StepsFollowTheDefiningRule) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Graph g = testing::random_connected_graph(25, 0.12, 700 + seed);
    const int k = seed % 2 ? 2 : 4;
    const SamplingSet set = greedy_select(g, 8, k);
    std::vector<Index> s;
    for (Index v : set.nodes) {
      Eigen::VectorXd phi;
      if (s.empty()) {
        phi = dense_spectral_basis(g).eigenvectors.col(0);
      } else {
        const auto sc = complement(25, s);
        const EigenPair p = dense_restricted_eigenpair(g, sc, k);
        phi = Eigen::VectorXd::Zero(25);
        for (std::size_t a = 0; a < sc.size(); ++a) phi[sc[a]] = p.vector[static_cast<Index>(a)];
      }
      EXPECT_EQ(v, argmax_squared(phi, s)) << "seed " << seed;
      s.push_back(v);
    }
  }
}

TEST(Greedy, CutoffsNondecreasingAndRecoveryCondition) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Graph g = testing::random_connected_graph(40, 0.08, 800 + seed);
    const SamplingSet set = greedy_select(g, 10, 8);
    ASSERT_EQ(set.cutoffs.size(), 10u);
    for (std::size_t t = 1; t < set.cutoffs.size(); ++t)
      EXPECT_GE(set.cutoffs[t], set.cutoffs[t - 1] - 1e-9);
    const SpectralBasis b = dense_spectral_basis(g);
    std::vector<Index> band;
    for (Index i = 0; i < b.size(); ++i)
      if (b.eigenvalues[i] < set.cutoff()) band.push_back(i);
    ASSERT_LE(band.size(), set.nodes.size());
    Eigen::MatrixXd usk(set.size(), static_cast<Index>(band.size()));
    for (Index a = 0; a < set.size(); ++a)
      for (std::size_t c = 0; c < band.size(); ++c)
        usk(a, static_cast<Index>(c)) = b.eigenvectors(set.nodes[static_cast<std::size_t>(a)], band[c]);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(usk);
    if (!band.empty()) {
      EXPECT_GT(svd.singularValues().minCoeff(), 1e-10 * svd.singularValues()[0]);
    }
  }
}

TEST(Greedy, SelectionIndependentOfSolverSeed) {
  const Graph g = testing::random_connected_graph(60, 0.05, 31);
  SolverConfig a;
  SolverConfig b;
  b.seed = 12345;
  EXPECT_EQ(greedy_select(g, 8, 8, a).nodes, greedy_select(g, 8, 8, b).nodes);
}

TEST(Greedy, RejectsBadSizes) {
  const Graph g = complete(4);
  EXPECT_THROW(greedy_select(g, 4, 1), ConfigError);
  EXPECT_THROW(greedy_select(g, 0, 1), ConfigError);
}

TEST(SamplingSet, PrefixAndCutoff) {
  SamplingSet s;
  s.nodes = {3, 1, 2};
  s.cutoffs = {0.1, 0.2, 0.3};
  const SamplingSet p = s.prefix(2);
  EXPECT_EQ(p.nodes, (std::vector<Index>{3, 1}));
  EXPECT_EQ(p.cutoff(), 0.2);
  EXPECT_EQ(s.prefix(0).cutoff(), 0.0);
}

TEST(RandomBaseline, BasicContract) {
  const SamplingSet a = random_baseline_select(10, 9, 5);
  std::vector<Index> sorted = a.nodes;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::unique(sorted.begin(), sorted.end()), sorted.end());
  EXPECT_EQ(sorted.size(), 9u);
  EXPECT_EQ(a.nodes, random_baseline_select(10, 9, 5).nodes);
  // growing m with one seed extends the set
  const SamplingSet small = random_baseline_select(50, 5, 8);
  const SamplingSet large = random_baseline_select(50, 20, 8);
  EXPECT_TRUE(std::equal(small.nodes.begin(), small.nodes.end(), large.nodes.begin()));
  EXPECT_THROW(random_baseline_select(10, 10, 0), ConfigError);
}

TEST(RandomBaseline, FrequencyAudit) {
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed)
    ++hits[static_cast<std::size_t>(random_baseline_select(10, 1, seed).nodes[0])];
  for (int h : hits) {
    EXPECT_GE(h, 800);
    EXPECT_LE(h, 1200);
  }
}

TEST(RecordCutoffs, MatchesIndividualEstimates) {
  const Graph g = testing::random_connected_graph(30, 0.1, 41);
  SamplingSet set = random_baseline_select(30, 6, 3, 4);
  record_cutoffs(g, set);
  ASSERT_EQ(set.cutoffs.size(), 6u);
  for (Index t = 1; t <= 6; ++t) {
    const std::vector<Index> prefix(set.nodes.begin(), set.nodes.begin() + t);
    EXPECT_NEAR(set.cutoffs[static_cast<std::size_t>(t - 1)],
                estimate_cutoff(g, prefix, 4).bandwidth_estimate, 1e-9);
  }
  record_cutoffs(g, set, {}, true);
  EXPECT_EQ(set.cutoffs.size(), 1u);
}

TEST(PartialOutDegree, Examples) {
  const Graph k3 = complete(3);
  const std::vector<Index> s0{0};
  const Eigen::VectorXd r = partial_out_degree_ratios(k3, s0);
  EXPECT_DOUBLE_EQ(r[0], 0.5);
  EXPECT_DOUBLE_EQ(r[1], 0.5);
  EXPECT_DOUBLE_EQ(surrogate_cutoff_min_ratio(k3, s0), 0.5);

  const Graph k6 = complete(6);
  const std::vector<Index> s2{1, 4};
  EXPECT_NEAR(surrogate_cutoff_min_ratio(k6, s2), 2.0 / 5.0, 1e-15);

  // leaf of a star with the hub in S: every edge crosses
  const Graph st = star(4);
  const std::vector<Index> hub{0};
  EXPECT_TRUE(partial_out_degree_ratios(st, hub).isOnes(0.0));
  // S holding only a leaf: the other leaves see nothing
  const std::vector<Index> leaf{1};
  EXPECT_EQ(surrogate_cutoff_min_ratio(st, leaf), 0.0);
  EXPECT_THROW(surrogate_cutoff_min_ratio(st, {}), ConfigError);
}

}  // namespace
}  // namespace gsamp
