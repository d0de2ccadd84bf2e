// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gsamp/gsamp.hpp"
#include "support/random_graphs.hpp"

using namespace gsamp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Eigen::VectorXd gaussian_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x[i] = gauss(rng);
  return x;
}

// Smallest lambda_j such that some nonzero signal in span{u_1..u_j} vanishes
// on S, found by rank tests on U_{S,1:j}.
double exhaustive_cutoff(const SpectralBasis& b, const std::vector<Index>& s) {
  for (Index j = 1; j <= b.size(); ++j) {
    Eigen::MatrixXd rows(static_cast<Index>(s.size()), j);
    for (std::size_t a = 0; a < s.size(); ++a)
      rows.row(static_cast<Index>(a)) = b.eigenvectors.row(s[a]).head(j);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    Index rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-9) ++rank;
    if (rank < j) return b.eigenvalues[j - 1];
  }
  return b.eigenvalues[b.size() - 1];
}

// (L^k)_{Sc} by explicit matrix powers of the dense Laplacian.
Eigen::MatrixXd assembled_restriction(const Graph& g, const std::vector<Index>& sc, int k) {
  const Eigen::MatrixXd l = dense_laplacian(g);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(g.size(), g.size());
  for (int i = 0; i < k; ++i) p = p * l;
  Eigen::MatrixXd r(sc.size(), sc.size());
  for (std::size_t a = 0; a < sc.size(); ++a)
    for (std::size_t c = 0; c < sc.size(); ++c) r(a, c) = p(sc[a], sc[c]);
  return r;
}

struct RecoveryInstance {
  Graph graph;
  SpectralBasis basis;
  SamplingSet set;
  GraphSignal f;
};

std::vector<RecoveryInstance> recovery_instances() {
  std::vector<RecoveryInstance> out;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Graph g = testing::random_connected_graph(50, 0.08, 100 + t);
    SpectralBasis b = dense_spectral_basis(g);
    SamplingSet set = greedy_select(g, 10, 8);
    Index band = 0;
    while (band < b.size() && b.eigenvalues[band] < set.cutoff()) ++band;
    GraphSignal f = b.eigenvectors.leftCols(band) * gaussian_vector(band, 300 + t);
    out.push_back({std::move(g), std::move(b), std::move(set), std::move(f)});
  }
  return out;
}

Outcome two_circles() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const LabeledFeatures data = make_two_circles(100, {1.0, 1.7}, 0.05, 7);
  GraphBuildConfig gc;
  gc.neighbors = 10;
  gc.sigma_scale = 1.0;
  const Graph g = build_knn_graph(data.features, gc);
  std::string counts;
  for (int k : {1, 8}) {
    const SamplingSet set = greedy_select(g, 8, k);
    int inner = 0;
    for (Index v : set.nodes) inner += data.labels[static_cast<std::size_t>(v)] == 0;
    counts += " k=" + std::to_string(k) + ":" + std::to_string(inner) + "/" +
              std::to_string(8 - inner);
    if (inner != 4) o.fail("k=" + std::to_string(k) + " split " + std::to_string(inner) + "/" +
                           std::to_string(8 - inner));
  }
  const double secs = seconds_since(t0);
  if (secs >= 10.0) o.fail("runtime " + fmt("%.2f s", secs));
  if (o.pass) o.detail = "per-circle counts" + counts + ", " + fmt("%.2f s", secs);
  return o;
}

Outcome perfect_recovery(const std::vector<RecoveryInstance>& instances) {
  Outcome o;
  double worst_ls = 0.0, worst_pocs = 0.0;
  int worst_iters = 0;
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const auto& in = instances[t];
    const SampledSignal samples = sample(in.f, in.set.nodes);
    const GraphSignal ls = least_squares_reconstruct(in.basis, samples, in.set.cutoff());
    worst_ls = std::max(worst_ls, (ls - in.f).norm() / in.f.norm());
    PocsConfig c;
    c.kernel = ideal_kernel(1.0);
    c.max_iters = 2000;
    c.stop_tol = 1e-10;
    const PocsResult p = pocs_reconstruct(in.basis, samples, in.set.cutoff(), c);
    worst_pocs = std::max(worst_pocs, (p.signal - in.f).norm() / in.f.norm());
    worst_iters = std::max(worst_iters, p.iterations);
  }
  if (worst_ls > 1e-8) o.fail("least squares error " + fmt("%.3e", worst_ls));
  if (worst_pocs > 1e-6) o.fail("POCS error " + fmt("%.3e", worst_pocs));
  if (o.pass)
    o.detail = std::to_string(instances.size()) + " graphs, LS " + fmt("%.2e", worst_ls) +
               ", POCS " + fmt("%.2e", worst_pocs) + " in <= " + std::to_string(worst_iters) +
               " iterations";
  return o;
}

Outcome cutoff_ordering() {
  Outcome o;
  const std::vector<Edge> e{{0, 1, 1.0}};
  const Graph pair = Graph::from_edges(2, e);
  const std::vector<Index> s{0};
  const double expected[] = {1.0, std::sqrt(2.0), std::pow(2.0, 0.75)};
  const int powers[] = {1, 2, 4};
  for (int i = 0; i < 3; ++i) {
    const double w = estimate_cutoff(pair, s, powers[i]).bandwidth_estimate;
    if (std::abs(w - expected[i]) > 1e-9)
      o.fail("two-node k=" + std::to_string(powers[i]) + " gave " + fmt("%.12f", w));
    if (w > 2.0) o.fail("two-node estimate above the cutoff 2");
  }
  int checked = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const Index n = 3 + static_cast<Index>(t % 6);
    const Graph g = testing::random_connected_graph(n, 0.4, 5000 + t);
    const SpectralBasis b = dense_spectral_basis(g);
    const Index size = 1 + static_cast<Index>((t / 6) % static_cast<std::uint64_t>(n - 1));
    const auto subset = testing::random_subset(n, size, 6000 + t);
    const double wc = exhaustive_cutoff(b, subset);
    for (int k : powers) {
      ++checked;
      const double w = estimate_cutoff(g, subset, k).bandwidth_estimate;
      if (w > wc + 1e-9)
        o.fail("instance " + std::to_string(t) + " k=" + std::to_string(k) + ": " +
               fmt("%.12f", w) + " > " + fmt("%.12f", wc));
    }
  }
  if (o.pass)
    o.detail = "two-node values exact to 1e-9; " + std::to_string(checked) +
               " small-graph estimates below the exhaustive cutoff";
  return o;
}

Outcome solver_oracle() {
  Outcome o;
  double worst_value = 0.0, worst_vector = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const Index n = 10 + static_cast<Index>((t * 53) % 91);
    const Graph g = testing::random_connected_graph(n, 3.0 / static_cast<double>(n), 7000 + t);
    const Index s_size = 1 + static_cast<Index>((t * 17) % static_cast<std::uint64_t>(n / 3));
    const auto sc = complement(n, testing::random_subset(n, s_size, 8000 + t));
    const int k = std::vector<int>{1, 2, 4, 8}[t % 4];
    SolverConfig config;
    config.seed = t;
    const EigenPair p = smallest_eigenpair_restricted(g, sc, k, config);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> direct(assembled_restriction(g, sc, k));
    Eigen::VectorXd ref = direct.eigenvectors().col(0);
    Eigen::VectorXd got = p.vector;
    fix_sign(ref);
    fix_sign(got);
    worst_value = std::max(worst_value, std::abs(p.value - direct.eigenvalues()[0]));
    worst_vector = std::max(worst_vector, (got - ref).norm());
  }
  if (worst_value > 1e-6) o.fail("value error " + fmt("%.3e", worst_value));
  if (worst_vector > 1e-5) o.fail("vector error " + fmt("%.3e", worst_vector));
  if (o.pass)
    o.detail = "50 instances, value " + fmt("%.2e", worst_value) + ", vector " +
               fmt("%.2e", worst_vector);
  return o;
}

Outcome filter_fidelity() {
  Outcome o;
  const SpectralKernel source = sigmoid_kernel(1.0, 8.0);
  const SpectralKernel p = chebyshev_approximate(source, 10);
  double grid = 0.0;
  for (int q = 0; q < 1000; ++q) {
    const double l = 2.0 * q / 999.0;
    grid = std::max(grid, std::abs(p(l) - source(l)));
  }
  if (grid > 0.05) o.fail("grid error " + fmt("%.4f", grid));

  double worst = 0.0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const Index n = 30 + 9 * static_cast<Index>(t);
    const Graph g = testing::random_connected_graph(n, 0.08, 9000 + t);
    const SpectralBasis b = dense_spectral_basis(g);
    const Eigen::VectorXd x = gaussian_vector(n, t);
    Eigen::VectorXd dense = b.eigenvectors.transpose() * x;
    for (Index i = 0; i < n; ++i) dense[i] *= p(b.eigenvalues[i]);
    dense = b.eigenvectors * dense;
    worst = std::max(worst, (apply_filter(g, p, x) - dense).cwiseAbs().maxCoeff());
  }
  if (worst > 1e-8) o.fail("matrix-free error " + fmt("%.3e", worst));

  const Graph g = testing::random_connected_graph(120, 0.01, 9100);
  int leaks = 0;
  for (int degree : {1, 2, 4, 7, 10}) {
    const SpectralKernel h = chebyshev_approximate(source, degree);
    for (Index v : {0, 33, 77, 119}) {
      Eigen::VectorXd impulse = Eigen::VectorXd::Zero(120);
      impulse[v] = 1.0;
      const Eigen::VectorXd y = apply_filter(g, h, impulse);
      const auto hops = g.hop_distances(v);
      for (Index i = 0; i < 120; ++i)
        if (hops[static_cast<std::size_t>(i)] > degree && y[i] != 0.0) ++leaks;
    }
  }
  if (leaks > 0) o.fail(std::to_string(leaks) + " nonzero entries beyond the hop radius");
  if (o.pass)
    o.detail = "grid error " + fmt("%.4f", grid) + ", matrix-free vs dense " +
               fmt("%.2e", worst) + ", impulse responses local";
  return o;
}

Outcome monotonicity() {
  Outcome o;
  int trajectories = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const Graph g = testing::random_connected_graph(40, 0.08, 9500 + t);
    for (int k : {1, 2, 8}) {
      const SamplingSet set = greedy_select(g, 15, k);
      ++trajectories;
      for (std::size_t i = 1; i < set.cutoffs.size(); ++i)
        if (set.cutoffs[i] < set.cutoffs[i - 1] - 1e-9)
          o.fail("cutoff decreased on graph " + std::to_string(t) + " k=" + std::to_string(k));
    }
  }
  for (std::uint64_t t = 0; t < 10; ++t) {
    const Graph g = testing::random_connected_graph(30, 0.1, 9600 + t);
    const SpectralBasis b = dense_spectral_basis(g);
    const GraphSignal f = gaussian_vector(30, 9700 + t);
    const EnergyCurve curve = gft_energy_cdf(b, f);
    if (curve.cumulative[0] < 0.0) o.fail("negative energy");
    for (Index i = 1; i < 30; ++i)
      if (curve.cumulative[i] < curve.cumulative[i - 1]) o.fail("energy curve decreased");
    if (std::abs(curve.cumulative[29] - 1.0) > 1e-10) o.fail("energy curve does not end at 1");
    double prev = std::numeric_limits<double>::infinity();
    for (int q = 0; q <= 50; ++q) {
      const double gamma = smoothness_gamma(b, f, f.norm() * q / 50.0);
      if (gamma > prev) o.fail("gamma increased with delta");
      prev = gamma;
    }
  }
  if (o.pass)
    o.detail = std::to_string(trajectories) +
               " greedy trajectories, 10 energy curves, 10 gamma sweeps";
  return o;
}

Outcome benchmark_ordering() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const bench::RunConfig config = bench::parse_run_config(bench::json::parse(R"({
    "dataset": {"name": "blobs500", "source": "blobs", "n_per_class": 50, "classes": 10,
                "dim": 10, "center_box": 5.0, "cluster_std": 3.0, "seed": 2024,
                "instances": 10},
    "selection": {"methods": ["greedy", "random"], "k": 8, "seed": 7,
                  "greedy_trials": 10, "random_trials": 30},
    "reconstruction": {"mode": "pocs"}
  })"));
  const bench::BenchmarkResult r = bench::run_benchmark(config);
  int wins = 0;
  std::string table;
  for (double pct : config.budgets_pct) {
    const double g = r.summary("greedy", 8, pct).mean;
    const double rnd = r.summary("random", 8, pct).mean;
    wins += g >= rnd;
    table += " " + io::format_double(pct) + "%:" + fmt("%.3f", g) + "/" + fmt("%.3f", rnd);
  }
  const double secs = seconds_since(t0);
  const int needed = static_cast<int>(std::ceil(0.9 * static_cast<double>(config.budgets_pct.size())));
  if (wins < needed) o.fail("greedy ahead at " + std::to_string(wins) + " budgets;" + table);
  if (secs >= 300.0) o.fail("runtime " + fmt("%.1f s", secs));
  if (o.pass)
    o.detail = "greedy >= random at " + std::to_string(wins) + "/" +
               std::to_string(config.budgets_pct.size()) + " budgets (" + fmt("%.1f s", secs) +
               ");" + table;
  return o;
}

Outcome label_bound(const std::vector<RecoveryInstance>& instances) {
  Outcome o;
  Index largest = 0;
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const auto& in = instances[t];
    const Index p = min_labels_lower_bound(in.basis, in.f, 0.0);
    largest = std::max(largest, p);
    if (in.set.size() < p)
      o.fail("instance " + std::to_string(t) + ": |S| = " + std::to_string(in.set.size()) +
             " < p = " + std::to_string(p));
  }
  if (o.pass)
    o.detail = "|S| = 10 >= p on " + std::to_string(instances.size()) + " instances (max p " +
               std::to_string(largest) + ")";
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "gsamp_acceptance_determinism";
  std::filesystem::remove_all(root);
  bench::RunConfig config = bench::parse_run_config(bench::json::parse(R"({
    "dataset": {"name": "blobs", "source": "blobs", "n_per_class": 20, "classes": 4,
                "dim": 5, "cluster_std": 2.0, "seed": 3, "instances": 2},
    "graph": {"neighbors": 8, "sigma_scale": 1.0},
    "selection": {"methods": ["greedy", "random"], "budgets_pct": [5, 10, 20], "k": 4,
                  "seed": 11, "greedy_trials": 2, "random_trials": 3},
    "reconstruction": {"mode": "pocs"}
  })"));
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  config.output_dir = (root / "a").string();
  bench::run_benchmark(config);
  config.output_dir = (root / "b").string();
  bench::run_benchmark(config);
  const std::string a = slurp(root / "a" / "metrics.csv");
  const std::string b = slurp(root / "b" / "metrics.csv");
  if (a.empty()) o.fail("no metrics written");
  if (a != b) o.fail("metrics.csv differs between runs");
  if (slurp(root / "a" / "summary.csv") != slurp(root / "b" / "summary.csv"))
    o.fail("summary.csv differs between runs");
  std::filesystem::remove_all(root);
  if (o.pass) o.detail = "metrics.csv identical (" + std::to_string(a.size()) + " bytes)";
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };

  std::vector<RecoveryInstance> instances;
  try {
    instances = recovery_instances();
  } catch (const std::exception& e) {
    std::printf("setup of recovery instances failed: %s\n", e.what());
  }

  report(1, "two-circles selection", two_circles);
  report(2, "perfect recovery", [&] { return perfect_recovery(instances); });
  report(3, "cutoff estimator ordering", cutoff_ordering);
  report(4, "solver oracle equivalence", solver_oracle);
  report(5, "filter fidelity", filter_fidelity);
  report(6, "monotonicity", monotonicity);
  report(7, "benchmark ordering", benchmark_ordering);
  report(8, "label budget lower bound", [&] { return label_bound(instances); });
  report(9, "determinism", determinism);

  if (instances.size() < 20) {
    std::printf("FAIL: only %zu recovery instances\n", instances.size());
    ++failed;
  }
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
