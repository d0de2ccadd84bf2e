#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gsamp/gsamp.hpp"

namespace {

using namespace gsamp;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GraphFlags {
  int neighbors = 10;
  std::string similarity = "gaussian";
  std::optional<double> sigma;
  double sigma_scale = 1.0 / 3.0;

  GraphBuildConfig config() const {
    GraphBuildConfig c;
    c.neighbors = neighbors;
    if (similarity == "gaussian") c.similarity = Similarity::gaussian;
    else if (similarity == "cosine") c.similarity = Similarity::cosine;
    else throw ConfigError("--similarity must be 'gaussian' or 'cosine'");
    c.sigma_override = sigma;
    c.sigma_scale = sigma_scale;
    return c;
  }
};

struct ReconFlags {
  std::string mode = "pocs";
  std::optional<double> omega;
  double alpha = kDefaultSigmoidAlpha;
  int degree = kDefaultFilterDegree;
  int max_iters = 2000;
  double stop_tol = 1e-7;

  PredictConfig config() const {
    PredictConfig c;
    if (mode == "exact") c.mode = ReconstructionMode::exact;
    else if (mode == "pocs") c.mode = ReconstructionMode::pocs;
    else throw ConfigError("--mode must be 'exact' or 'pocs'");
    c.omega = omega;
    c.pocs.kernel = sigmoid_kernel(1.0, alpha);
    c.pocs.degree = degree;
    c.pocs.max_iters = max_iters;
    c.pocs.stop_tol = stop_tol;
    return c;
  }
};

void add_graph_flags(CLI::App* cmd, GraphFlags& g) {
  cmd->add_option("--neighbors", g.neighbors, "nearest neighbors per node")->capture_default_str();
  cmd->add_option("--similarity", g.similarity, "gaussian or cosine")->capture_default_str();
  cmd->add_option("--sigma", g.sigma, "fixed Gaussian width");
  cmd->add_option("--sigma-scale", g.sigma_scale,
                  "width as a multiple of the mean K-th neighbor distance")
      ->capture_default_str();
}

void add_recon_flags(CLI::App* cmd, ReconFlags& r) {
  cmd->add_option("--mode", r.mode, "exact or pocs")->capture_default_str();
  cmd->add_option("--omega", r.omega, "cutoff (default: the set's recorded estimate)");
  cmd->add_option("--alpha", r.alpha, "sigmoid steepness")->capture_default_str();
  cmd->add_option("--degree", r.degree, "Chebyshev degree")->capture_default_str();
  cmd->add_option("--max-iters", r.max_iters, "POCS iteration cap")->capture_default_str();
  cmd->add_option("--stop-tol", r.stop_tol, "POCS relative change tolerance")
      ->capture_default_str();
}

// Writes to `path`, or stdout for "-" or an empty path.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  auto out = io::detail::open_output(path);
  fn(out);
}

SamplingSet select_nodes(const Graph& graph, const std::string& method, Index m, int k,
                         std::uint64_t seed, const SolverConfig& solver) {
  if (method == "greedy") return greedy_select(graph, m, k, solver);
  if (method == "random") {
    SamplingSet set = random_baseline_select(graph.size(), m, seed, k);
    record_cutoffs(graph, set, solver);
    return set;
  }
  throw ConfigError("--method must be 'greedy' or 'random'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph sampling: choose nodes to label and reconstruct the rest"};
  app.require_subcommand(1);

  // build
  std::string features_path;
  std::string edges_out;
  GraphFlags build_graph;
  auto* build = app.add_subcommand("build", "features CSV -> edge list");
  build->add_option("--features", features_path, "header-less CSV, one row per node")->required();
  build->add_option("-o,--out", edges_out, "edge list output (default stdout)");
  add_graph_flags(build, build_graph);

  // select
  std::string edges_path;
  std::string set_out;
  std::string method = "greedy";
  Index m = 0;
  int k = kDefaultPower;
  std::uint64_t seed = 0;
  SolverConfig solver;
  auto* select = app.add_subcommand("select", "edge list -> sampling set");
  select->add_option("--edges", edges_path, "edge list")->required();
  select->add_option("-m,--size", m, "number of nodes to select")->required();
  select->add_option("-k,--power", k, "Laplacian power")->capture_default_str();
  select->add_option("--method", method, "greedy or random")->capture_default_str();
  select->add_option("--seed", seed, "random baseline seed")->capture_default_str();
  select->add_option("--solver-tol", solver.tol, "eigensolver tolerance")->capture_default_str();
  select->add_option("-o,--out", set_out, "sampling set output (default stdout)");

  // reconstruct
  std::string set_path;
  std::string samples_path;
  std::string signal_out;
  ReconFlags recon_flags;
  auto* reconstruct = app.add_subcommand("reconstruct", "sampling set + samples -> signal");
  reconstruct->add_option("--edges", edges_path, "edge list")->required();
  reconstruct->add_option("--samples", samples_path, "'index value' pairs")->required();
  reconstruct->add_option("--set", set_path, "sampling set file supplying the cutoff");
  reconstruct->add_option("-o,--out", signal_out, "signal output (default stdout)");
  add_recon_flags(reconstruct, recon_flags);

  // classify
  std::string labels_path;
  std::string predictions_out;
  GraphFlags classify_graph;
  ReconFlags classify_recon;
  auto* classify = app.add_subcommand("classify", "select, query labels, predict the rest");
  auto* classify_edges = classify->add_option("--edges", edges_path, "edge list");
  classify->add_option("--features", features_path, "features CSV (builds the graph)")
      ->excludes(classify_edges);
  classify->add_option("--labels", labels_path, "ground-truth labels, one per line")->required();
  classify->add_option("-m,--size", m, "label budget")->required();
  classify->add_option("-k,--power", k, "Laplacian power")->capture_default_str();
  classify->add_option("--method", method, "greedy or random")->capture_default_str();
  classify->add_option("--seed", seed, "random baseline seed")->capture_default_str();
  classify->add_option("--set-out", set_out, "also write the selected set here");
  classify->add_option("-o,--out", predictions_out, "predictions CSV (default stdout)");
  add_graph_flags(classify, classify_graph);
  add_recon_flags(classify, classify_recon);

  // bench
  std::string config_path;
  std::string output_dir;
  bool timings = false;
  auto* bench_cmd = app.add_subcommand("bench", "run config (JSON) -> metrics CSV");
  bench_cmd->add_option("config", config_path, "run configuration")->required();
  bench_cmd->add_option("-o,--out-dir", output_dir, "overrides outputs.directory");
  bench_cmd->add_flag("--timings", timings, "record wall-clock columns");

  // spectrum
  std::string spectrum_out;
  auto* spectrum = app.add_subcommand("spectrum", "GFT energy CDF of each class signal");
  spectrum->add_option("--edges", edges_path, "edge list")->required();
  spectrum->add_option("--labels", labels_path, "labels, one per line")->required();
  spectrum->add_option("-o,--out", spectrum_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (build->parsed()) {
      const Graph g = build_knn_graph(io::read_features_csv(features_path), build_graph.config());
      emit(edges_out, [&](std::ostream& out) { io::write_edge_list(out, g); });
    } else if (select->parsed()) {
      const Graph g = io::read_edge_list(edges_path);
      const SamplingSet set = select_nodes(g, method, m, k, seed, solver);
      emit(set_out, [&](std::ostream& out) { io::write_sampling_set(out, set); });
    } else if (reconstruct->parsed()) {
      const Graph g = io::read_edge_list(edges_path);
      const SampledSignal samples = io::read_samples(samples_path);
      const PredictConfig pc = recon_flags.config();
      double omega = 0.0;
      if (pc.omega) omega = *pc.omega;
      else if (!set_path.empty()) omega = io::read_sampling_set(set_path).cutoff();
      if (!(omega > 0.0)) throw ConfigError("give --omega or a --set with recorded cutoffs");
      GraphSignal f;
      if (pc.mode == ReconstructionMode::exact) {
        f = least_squares_reconstruct(dense_spectral_basis(g), samples, omega);
        gsamp::detail::reset_samples(f, samples);
      } else {
        const PocsResult r = pocs_reconstruct(g, samples, omega, pc.pocs);
        if (!r.converged)
          std::cerr << "warning: POCS stopped after " << r.iterations
                    << " iterations with relative change " << r.last_change << "\n";
        f = r.signal;
      }
      emit(signal_out, [&](std::ostream& out) { io::write_signal(out, f); });
    } else if (classify->parsed()) {
      if (features_path.empty() && edges_path.empty())
        throw ConfigError("classify needs --edges or --features");
      const Graph g = features_path.empty()
                          ? io::read_edge_list(edges_path)
                          : build_knn_graph(io::read_features_csv(features_path),
                                            classify_graph.config());
      const LabeledOracle oracle(io::read_labels(labels_path));
      if (oracle.size() != g.size())
        throw ConfigError("label count " + std::to_string(oracle.size()) +
                          " does not match node count " + std::to_string(g.size()));
      const SamplingSet set = select_nodes(g, method, m, k, seed, solver);
      if (!set_out.empty())
        emit(set_out, [&](std::ostream& out) { io::write_sampling_set(out, set); });
      const PredictConfig pc = classify_recon.config();
      std::optional<SpectralBasis> basis;
      if (pc.mode == ReconstructionMode::exact) basis = dense_spectral_basis(g);
      const MembershipPrediction pred = predict(g, set, oracle, pc, basis ? &*basis : nullptr);
      for (const auto& w : pred.warnings) std::cerr << "warning: " << w << "\n";
      emit(predictions_out, [&](std::ostream& out) { io::write_predictions(out, pred); });
      std::cerr << "accuracy on unlabeled nodes: "
                << unlabeled_accuracy(pred.predicted, oracle.ground_truth(), set.nodes) << "\n";
    } else if (bench_cmd->parsed()) {
      bench::RunConfig config = bench::load_run_config(config_path);
      if (!output_dir.empty()) config.output_dir = output_dir;
      if (timings) config.record_timings = true;
      const bench::BenchmarkResult result = bench::run_benchmark(config);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      if (config.output_dir.empty()) bench::write_metrics_csv(std::cout, result, config.record_timings);
      else
        bench::write_summary_csv(std::cout, config.dataset.name, result);
    } else if (spectrum->parsed()) {
      const Graph g = io::read_edge_list(edges_path);
      const auto labels = io::read_labels(labels_path);
      emit(spectrum_out, [&](std::ostream& out) { bench::emit_spectrum_report(out, g, labels); });
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
