#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "gsamp/io.hpp"

namespace gsamp::bench {

using json = nlohmann::json;

struct DatasetSpec {
  std::string name = "dataset";
  // "circles", "blobs", "features" (CSV + labels), "edges" (edge list +
  // labels) or "term_counts" (triplets + labels, tf-idf then cosine graph).
  std::string source = "blobs";
  std::uint64_t seed = 0;
  int instances = 1;  // synthetic sources only
  // circles
  Index n_per_circle = 100;
  std::pair<double, double> radii{1.0, 1.7};
  double noise = 0.05;
  // blobs
  Index n_per_class = 50;
  int classes = 10;
  Index dim = 10;
  double center_box = 5.0;
  double cluster_std = 3.0;
  // files
  std::string features_path;
  std::string edges_path;
  std::string term_counts_path;
  std::string labels_path;
  Index min_doc_freq = 1;
  Index vocab_cap = 2000;
};

struct RunConfig {
  DatasetSpec dataset;
  GraphBuildConfig graph;
  std::vector<std::string> methods{"greedy", "random"};
  std::vector<double> budgets_pct{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> powers{kDefaultPower};
  std::uint64_t seed = 0;
  int greedy_trials = 1;
  int random_trials = 30;
  bool require_class_coverage = false;
  SolverConfig solver;
  PredictConfig predict;
  std::string output_dir;  // empty: nothing written
  bool record_timings = false;
};

/// One metrics row.
struct TrialRecord {
  std::string dataset;
  std::string method;
  int k = 0;
  double budget_pct = 0.0;
  int trial = 0;
  double accuracy = 0.0;
  double omega = 0.0;
  double select_ms = 0.0;
  double recon_ms = 0.0;
};

struct BudgetSummary {
  std::string method;
  int k = 0;
  double budget_pct = 0.0;
  int trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

struct BenchmarkResult {
  std::vector<TrialRecord> records;
  std::vector<BudgetSummary> summaries;
  std::vector<std::string> warnings;
  double total_ms = 0.0;

  /// Summary lookup; throws when the combination was not run.
  const BudgetSummary& summary(const std::string& method, int k, double budget_pct) const {
    for (const auto& s : summaries)
      if (s.method == method && s.k == k && s.budget_pct == budget_pct) return s;
    throw ConfigError("no summary for " + method + " k=" + std::to_string(k));
  }
};

namespace detail {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x632BE59BD9B4E5Full;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

/// Parses a run configuration. Unknown keys are rejected so typos surface.
inline RunConfig parse_run_config(const json& j) {
  RunConfig c;
  try {
    auto check_keys = [](const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
      if (!obj.is_object()) throw ConfigError(where + " must be an object");
      for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
      }
    };
    check_keys(j, {"dataset", "graph", "selection", "reconstruction", "outputs"}, "config");

    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      check_keys(d,
                 {"name", "source", "seed", "instances", "n_per_circle", "radii", "noise",
                  "n_per_class", "classes", "dim", "center_box", "cluster_std", "features",
                  "edges", "term_counts", "labels", "min_doc_freq", "vocab_cap"},
                 "dataset");
      auto& s = c.dataset;
      detail::read_if(d, "name", s.name);
      detail::read_if(d, "source", s.source);
      detail::read_if(d, "seed", s.seed);
      detail::read_if(d, "instances", s.instances);
      detail::read_if(d, "n_per_circle", s.n_per_circle);
      if (d.contains("radii")) {
        const auto r = d.at("radii").get<std::vector<double>>();
        if (r.size() != 2) throw ConfigError("dataset.radii needs two values");
        s.radii = {r[0], r[1]};
      }
      detail::read_if(d, "noise", s.noise);
      detail::read_if(d, "n_per_class", s.n_per_class);
      detail::read_if(d, "classes", s.classes);
      detail::read_if(d, "dim", s.dim);
      detail::read_if(d, "center_box", s.center_box);
      detail::read_if(d, "cluster_std", s.cluster_std);
      detail::read_if(d, "features", s.features_path);
      detail::read_if(d, "edges", s.edges_path);
      detail::read_if(d, "term_counts", s.term_counts_path);
      detail::read_if(d, "labels", s.labels_path);
      detail::read_if(d, "min_doc_freq", s.min_doc_freq);
      detail::read_if(d, "vocab_cap", s.vocab_cap);
    }
    if (j.contains("graph")) {
      const json& g = j.at("graph");
      check_keys(g, {"neighbors", "similarity", "sigma", "sigma_scale"}, "graph");
      detail::read_if(g, "neighbors", c.graph.neighbors);
      if (g.contains("similarity")) {
        const auto sim = g.at("similarity").get<std::string>();
        if (sim == "gaussian") c.graph.similarity = Similarity::gaussian;
        else if (sim == "cosine") c.graph.similarity = Similarity::cosine;
        else throw ConfigError("graph.similarity must be 'gaussian' or 'cosine'");
      }
      if (g.contains("sigma") && !g.at("sigma").is_null())
        c.graph.sigma_override = g.at("sigma").get<double>();
      detail::read_if(g, "sigma_scale", c.graph.sigma_scale);
    }
    if (j.contains("selection")) {
      const json& s = j.at("selection");
      check_keys(s,
                 {"method", "methods", "budgets_pct", "k", "seed", "greedy_trials",
                  "random_trials", "trials", "require_class_coverage", "solver_tol",
                  "solver_max_iters"},
                 "selection");
      if (s.contains("method")) c.methods = {s.at("method").get<std::string>()};
      detail::read_if(s, "methods", c.methods);
      detail::read_if(s, "budgets_pct", c.budgets_pct);
      if (s.contains("k")) {
        if (s.at("k").is_array()) c.powers = s.at("k").get<std::vector<int>>();
        else c.powers = {s.at("k").get<int>()};
      }
      detail::read_if(s, "seed", c.seed);
      if (s.contains("trials")) {
        c.greedy_trials = c.random_trials = s.at("trials").get<int>();
      }
      detail::read_if(s, "greedy_trials", c.greedy_trials);
      detail::read_if(s, "random_trials", c.random_trials);
      detail::read_if(s, "require_class_coverage", c.require_class_coverage);
      detail::read_if(s, "solver_tol", c.solver.tol);
      detail::read_if(s, "solver_max_iters", c.solver.max_iters);
    }
    if (j.contains("reconstruction")) {
      const json& r = j.at("reconstruction");
      check_keys(r, {"mode", "kernel", "max_iters", "stop_tol", "omega"}, "reconstruction");
      if (r.contains("mode")) {
        const auto mode = r.at("mode").get<std::string>();
        if (mode == "exact") c.predict.mode = ReconstructionMode::exact;
        else if (mode == "pocs") c.predict.mode = ReconstructionMode::pocs;
        else throw ConfigError("reconstruction.mode must be 'exact' or 'pocs'");
      }
      if (r.contains("kernel")) {
        const json& k = r.at("kernel");
        check_keys(k, {"kind", "omega", "alpha", "degree"}, "reconstruction.kernel");
        const auto kind = k.value("kind", std::string("sigmoid"));
        const double alpha = k.value("alpha", kDefaultSigmoidAlpha);
        if (kind == "sigmoid") c.predict.pocs.kernel = sigmoid_kernel(1.0, alpha);
        else if (kind == "ideal") c.predict.pocs.kernel = ideal_kernel(1.0);
        else throw ConfigError("reconstruction.kernel.kind must be 'sigmoid' or 'ideal'");
        detail::read_if(k, "degree", c.predict.pocs.degree);
        if (k.contains("omega")) c.predict.omega = k.at("omega").get<double>();
      }
      detail::read_if(r, "max_iters", c.predict.pocs.max_iters);
      detail::read_if(r, "stop_tol", c.predict.pocs.stop_tol);
      if (r.contains("omega")) c.predict.omega = r.at("omega").get<double>();
    }
    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      check_keys(o, {"directory", "record_timings"}, "outputs");
      detail::read_if(o, "directory", c.output_dir);
      detail::read_if(o, "record_timings", c.record_timings);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid run config: ") + e.what());
  }

  for (double b : c.budgets_pct)
    if (!(b > 0.0 && b < 100.0)) throw ConfigError("budgets must lie in (0, 100)");
  ::gsamp::detail::require(!c.budgets_pct.empty(), "budget list is empty");
  ::gsamp::detail::require(c.greedy_trials >= 1 && c.random_trials >= 1, "trials must be >= 1");
  ::gsamp::detail::require(c.dataset.instances >= 1, "dataset.instances must be >= 1");
  ::gsamp::detail::require(!c.methods.empty(), "no selection method given");
  for (const auto& m : c.methods)
    if (m != "greedy" && m != "random")
      throw ConfigError("selection method must be 'greedy' or 'random', got '" + m + "'");
  for (int k : c.powers) ::gsamp::detail::validate_power(k);
  if (c.predict.pocs.kernel.kind == KernelKind::ideal &&
      c.predict.mode == ReconstructionMode::pocs)
    throw ConfigError(
        "the ideal kernel has no polynomial realization; use the sigmoid kernel for POCS "
        "or mode 'exact'");
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  auto in = io::detail::open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_run_config(j);
}

/// A graph with its ground-truth labels.
struct Instance {
  Graph graph;
  std::vector<int> labels;
};

/// Builds instance `index` of the dataset (file sources have only one).
inline Instance load_instance(const DatasetSpec& d, const GraphBuildConfig& g, int index) {
  const std::uint64_t seed = d.seed + static_cast<std::uint64_t>(index);
  Instance out;
  if (d.source == "circles") {
    auto data = make_two_circles(d.n_per_circle, d.radii, d.noise, seed);
    out.graph = build_knn_graph(data.features, g);
    out.labels = std::move(data.labels);
  } else if (d.source == "blobs") {
    auto data = make_gaussian_blobs(d.n_per_class, d.classes, d.dim, d.center_box,
                                    d.cluster_std, seed);
    out.graph = build_knn_graph(data.features, g);
    out.labels = std::move(data.labels);
  } else if (d.source == "features" || d.source == "edges" || d.source == "term_counts") {
    ::gsamp::detail::require(!d.labels_path.empty(), "dataset.labels is required");
    out.labels = io::read_labels(d.labels_path);
    if (d.source == "features") {
      ::gsamp::detail::require(!d.features_path.empty(), "dataset.features is required");
      out.graph = build_knn_graph(io::read_features_csv(d.features_path), g);
    } else if (d.source == "edges") {
      ::gsamp::detail::require(!d.edges_path.empty(), "dataset.edges is required");
      out.graph = io::read_edge_list(d.edges_path, static_cast<Index>(out.labels.size()));
    } else {
      ::gsamp::detail::require(!d.term_counts_path.empty(), "dataset.term_counts is required");
      TermCounts counts = io::read_term_counts(d.term_counts_path);
      counts.documents = std::max(counts.documents, static_cast<Index>(out.labels.size()));
      out.graph = build_knn_graph(tfidf_features(counts, d.min_doc_freq, d.vocab_cap).features, g);
    }
  } else {
    throw ConfigError("unknown dataset source '" + d.source + "'");
  }
  if (static_cast<Index>(out.labels.size()) != out.graph.size())
    throw ConfigError("dataset has " + std::to_string(out.labels.size()) + " labels for " +
                      std::to_string(out.graph.size()) + " nodes");
  return out;
}

inline int instance_count(const DatasetSpec& d) {
  return (d.source == "circles" || d.source == "blobs") ? d.instances : 1;
}

/// Label count for a budget percentage: round(pct * N / 100), at least 1.
inline Index budget_size(double pct, Index n) {
  const auto m = static_cast<Index>(std::llround(pct * static_cast<double>(n) / 100.0));
  return std::clamp<Index>(m, 1, n - 1);
}

namespace detail {

inline void write_metrics_header(std::ostream& out) {
  out << "dataset,method,k,budget_pct,trial,accuracy,omega,select_ms,recon_ms\n";
}

inline void write_metrics_row(std::ostream& out, const TrialRecord& r, bool timings) {
  out << r.dataset << ',' << r.method << ',' << r.k << ',' << io::format_double(r.budget_pct)
      << ',' << r.trial << ',' << io::format_double(r.accuracy) << ','
      << io::format_double(r.omega) << ',';
  if (timings) out << io::format_double(r.select_ms) << ',' << io::format_double(r.recon_ms);
  else out << ',';
  out << '\n';
}

}  // namespace detail

inline void write_metrics_csv(std::ostream& out, const BenchmarkResult& result, bool timings) {
  detail::write_metrics_header(out);
  for (const auto& r : result.records) detail::write_metrics_row(out, r, timings);
}

inline void write_summary_csv(std::ostream& out, const std::string& dataset,
                              const BenchmarkResult& result) {
  out << "dataset,method,k,budget_pct,trials,mean_accuracy,std_accuracy\n";
  for (const auto& s : result.summaries)
    out << dataset << ',' << s.method << ',' << s.k << ',' << io::format_double(s.budget_pct)
        << ',' << s.trials << ',' << io::format_double(s.mean) << ','
        << io::format_double(s.stddev) << '\n';
}

/// Runs every (method, k, budget, trial) combination. Greedy trial t runs on
/// dataset instance t mod instances; greedy sets for all budgets are prefixes
/// of one run. Random trial t draws a seeded permutation on instance
/// t mod instances and uses its prefixes. Accuracy is measured on unlabeled
/// nodes only. Timings go to the CSV only when record_timings is set, so
/// that repeated runs produce identical files.
inline BenchmarkResult run_benchmark(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  BenchmarkResult result;
  const int instances = instance_count(config.dataset);
  std::vector<std::optional<Instance>> cache(static_cast<std::size_t>(instances));
  std::vector<std::optional<SpectralBasis>> bases(static_cast<std::size_t>(instances));
  auto instance = [&](int t) -> const Instance& {
    auto& slot = cache[static_cast<std::size_t>(t % instances)];
    if (!slot) slot = load_instance(config.dataset, config.graph, t % instances);
    return *slot;
  };
  auto basis = [&](int t) -> const SpectralBasis* {
    if (config.predict.mode != ReconstructionMode::exact) return nullptr;
    auto& slot = bases[static_cast<std::size_t>(t % instances)];
    if (!slot) slot = dense_spectral_basis(instance(t).graph);
    return &*slot;
  };

  std::map<std::tuple<std::string, int, double>, std::vector<double>> grouped;
  for (const auto& method : config.methods) {
    const bool greedy = method == "greedy";
    const int trials = greedy ? config.greedy_trials : config.random_trials;
    for (int k : config.powers) {
      for (int t = 0; t < trials; ++t) {
        const Instance& inst = instance(t);
        const Index n = inst.graph.size();
        Index largest = 0;
        for (double b : config.budgets_pct) largest = std::max(largest, budget_size(b, n));

        auto sel_start = std::chrono::steady_clock::now();
        SamplingSet full;
        if (greedy) {
          full = greedy_select(inst.graph, largest, k, config.solver);
        } else {
          full = random_baseline_select(n, largest, detail::mix_seed(config.seed, t), k);
        }
        double select_ms = detail::elapsed_ms(sel_start);
        std::optional<RestrictedEigenSolver> solver;
        if (!greedy) solver.emplace(inst.graph, k, config.solver);

        if (!config.output_dir.empty()) {
          const auto dir = std::filesystem::path(config.output_dir) / "sets";
          std::filesystem::create_directories(dir);
          auto out = io::detail::open_output(
              (dir / (method + "_k" + std::to_string(k) + "_t" + std::to_string(t) + ".txt"))
                  .string());
          io::write_sampling_set(out, full);
        }

        const LabeledOracle oracle(inst.labels);
        for (double pct : config.budgets_pct) {
          const Index m = budget_size(pct, n);
          SamplingSet set = full.prefix(m);
          if (!greedy) {
            const auto cut_start = std::chrono::steady_clock::now();
            set.cutoffs.assign(1, ::gsamp::detail::estimate_cutoff_with(*solver, inst.graph,
                                                                        set.nodes)
                                      .bandwidth_estimate);
            select_ms += detail::elapsed_ms(cut_start);
          }
          const auto rec_start = std::chrono::steady_clock::now();
          const MembershipPrediction pred = predict(inst.graph, set, oracle, config.predict, basis(t));
          const double recon_ms = detail::elapsed_ms(rec_start);
          if (config.require_class_coverage && !pred.warnings.empty())
            throw ConfigError("budget " + io::format_double(pct) + "% of " + method +
                              " trial " + std::to_string(t) + " misses a class: " +
                              pred.warnings.front());
          for (const auto& w : pred.warnings)
            result.warnings.push_back(method + " k=" + std::to_string(k) + " budget " +
                                      io::format_double(pct) + "% trial " +
                                      std::to_string(t) + ": " + w);
          if (!pred.converged)
            result.warnings.push_back(method + " k=" + std::to_string(k) + " budget " +
                                      io::format_double(pct) + "% trial " +
                                      std::to_string(t) + ": POCS hit its iteration cap");
          TrialRecord r;
          r.dataset = config.dataset.name;
          r.method = method;
          r.k = k;
          r.budget_pct = pct;
          r.trial = t;
          r.accuracy = unlabeled_accuracy(pred.predicted, inst.labels, set.nodes);
          r.omega = set.cutoff();
          r.select_ms = select_ms;
          r.recon_ms = recon_ms;
          result.records.push_back(r);
          grouped[{method, k, pct}].push_back(r.accuracy);
        }
      }
    }
  }

  for (const auto& method : config.methods)
    for (int k : config.powers)
      for (double pct : config.budgets_pct) {
        const auto& acc = grouped[{method, k, pct}];
        BudgetSummary s{method, k, pct, static_cast<int>(acc.size()), 0.0, 0.0};
        for (double a : acc) s.mean += a;
        s.mean /= static_cast<double>(acc.size());
        for (double a : acc) s.stddev += (a - s.mean) * (a - s.mean);
        s.stddev = std::sqrt(s.stddev / static_cast<double>(acc.size()));
        result.summaries.push_back(s);
      }

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    const auto dir = std::filesystem::path(config.output_dir);
    auto metrics = io::detail::open_output((dir / "metrics.csv").string());
    write_metrics_csv(metrics, result, config.record_timings);
    auto summary = io::detail::open_output((dir / "summary.csv").string());
    write_summary_csv(summary, config.dataset.name, result);
  }
  result.total_ms = detail::elapsed_ms(start);
  return result;
}

/// GFT energy curve of every class membership signal:
/// "class,index,eigenvalue,cumulative_energy".
inline void emit_spectrum_report(std::ostream& out, const Graph& graph,
                                 const std::vector<int>& labels,
                                 Index limit = kDefaultOracleLimit) {
  ::gsamp::detail::require(static_cast<Index>(labels.size()) == graph.size(),
                           "label count does not match the graph");
  const SpectralBasis basis = dense_spectral_basis(graph, limit);
  const LabeledOracle oracle(labels);
  out << "class,index,eigenvalue,cumulative_energy\n";
  for (int c = 0; c < oracle.classes(); ++c) {
    GraphSignal f(graph.size());
    for (Index i = 0; i < graph.size(); ++i)
      f[i] = labels[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0;
    if (f.isZero(0.0)) continue;  // class id unused
    const EnergyCurve curve = gft_energy_cdf(basis, f);
    for (Index i = 0; i < basis.size(); ++i)
      out << c << ',' << i << ',' << io::format_double(curve.eigenvalues[i]) << ','
          << io::format_double(curve.cumulative[i]) << '\n';
  }
}

}  // namespace gsamp::bench
