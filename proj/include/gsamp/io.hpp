#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gsamp/active_ssl.hpp"
#include "gsamp/datasets.hpp"

namespace gsamp::io {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path + " for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  return out;
}

[[noreturn]] inline void fail(const std::string& source, std::size_t line,
                              const std::string& message) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + message);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Splits on whitespace, or on `delim` when it is not a space.
inline std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  if (delim == ' ') {
    std::size_t pos = 0;
    while (pos < s.size()) {
      const auto start = s.find_first_not_of(" \t\r", pos);
      if (start == std::string_view::npos) break;
      auto end = s.find_first_of(" \t\r", start);
      if (end == std::string_view::npos) end = s.size();
      out.push_back(s.substr(start, end - start));
      pos = end;
    }
  } else {
    std::size_t pos = 0;
    while (true) {
      const auto end = s.find(delim, pos);
      out.push_back(trim(s.substr(pos, end == std::string_view::npos ? end : end - pos)));
      if (end == std::string_view::npos) break;
      pos = end + 1;
    }
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, const std::string& source, std::size_t line) {
  T value{};
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    fail(source, line, "cannot parse '" + std::string(token) + "' as a number");
  return value;
}

// Calls fn(fields, line_number) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::istream& in, char delim, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    fn(split(body, delim), number);
  }
}

}  // namespace detail

/// Edge list: "i j w" per line, 0-based, each undirected edge once. The node
/// count is one more than the largest index unless `n` is given.
inline Graph read_edge_list(std::istream& in, const std::string& source = "edge list",
                            Index n = -1, GraphOptions options = {}) {
  std::vector<Edge> edges;
  Index largest = -1;
  detail::for_each_record(in, ' ', [&](const auto& f, std::size_t line) {
    if (f.size() != 3) detail::fail(source, line, "expected 'i j w'");
    Edge e{detail::parse_number<Index>(f[0], source, line),
           detail::parse_number<Index>(f[1], source, line),
           detail::parse_number<double>(f[2], source, line)};
    if (e.u < 0 || e.v < 0) detail::fail(source, line, "negative node index");
    largest = std::max({largest, e.u, e.v});
    edges.push_back(e);
  });
  if (n < 0) n = largest + 1;
  return Graph::from_edges(n, edges, options);
}

inline Graph read_edge_list(const std::string& path, Index n = -1) {
  auto in = detail::open_input(path);
  return read_edge_list(in, path, n);
}

inline void write_edge_list(std::ostream& out, const Graph& graph) {
  out << "# nodes: " << graph.size() << "\n";
  for (const Edge& e : graph.edges())
    out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
}

/// Header-less comma-separated decimal rows.
inline FeatureMatrix read_features_csv(std::istream& in, const std::string& source = "features") {
  std::vector<std::vector<double>> rows;
  detail::for_each_record(in, ',', [&](const auto& f, std::size_t line) {
    std::vector<double> row;
    row.reserve(f.size());
    for (auto token : f) row.push_back(detail::parse_number<double>(token, source, line));
    if (!rows.empty() && row.size() != rows.front().size())
      detail::fail(source, line,
                   "expected " + std::to_string(rows.front().size()) + " columns, found " +
                       std::to_string(row.size()));
    rows.push_back(std::move(row));
  });
  if (rows.empty()) throw ConfigError(source + ": no feature rows");
  FeatureMatrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return x;
}

inline FeatureMatrix read_features_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_features_csv(in, path);
}

inline void write_features_csv(std::ostream& out, const FeatureMatrix& x) {
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << format_double(x(i, j));
    out << '\n';
  }
}

/// One nonnegative integer class id per line.
inline std::vector<int> read_labels(std::istream& in, const std::string& source = "labels") {
  std::vector<int> labels;
  detail::for_each_record(in, ' ', [&](const auto& f, std::size_t line) {
    if (f.size() != 1) detail::fail(source, line, "expected one class id");
    const int label = detail::parse_number<int>(f[0], source, line);
    if (label < 0) detail::fail(source, line, "class ids must be nonnegative");
    labels.push_back(label);
  });
  return labels;
}

inline std::vector<int> read_labels(const std::string& path) {
  auto in = detail::open_input(path);
  return read_labels(in, path);
}

inline void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int label : labels) out << label << '\n';
}

/// "doc term count" triplets, 0-based.
inline TermCounts read_term_counts(std::istream& in, const std::string& source = "term counts") {
  TermCounts counts;
  detail::for_each_record(in, ' ', [&](const auto& f, std::size_t line) {
    if (f.size() != 3) detail::fail(source, line, "expected 'doc term count'");
    TermCounts::Entry e{detail::parse_number<Index>(f[0], source, line),
                        detail::parse_number<Index>(f[1], source, line),
                        detail::parse_number<double>(f[2], source, line)};
    if (e.doc < 0 || e.term < 0) detail::fail(source, line, "negative id");
    counts.documents = std::max(counts.documents, e.doc + 1);
    counts.terms = std::max(counts.terms, e.term + 1);
    counts.entries.push_back(e);
  });
  return counts;
}

inline TermCounts read_term_counts(const std::string& path) {
  auto in = detail::open_input(path);
  return read_term_counts(in, path);
}

/// One value per line.
inline GraphSignal read_signal(std::istream& in, const std::string& source = "signal") {
  std::vector<double> values;
  detail::for_each_record(in, ' ', [&](const auto& f, std::size_t line) {
    if (f.size() != 1) detail::fail(source, line, "expected one value");
    values.push_back(detail::parse_number<double>(f[0], source, line));
  });
  return Eigen::Map<const GraphSignal>(values.data(), static_cast<Index>(values.size()));
}

inline GraphSignal read_signal(const std::string& path) {
  auto in = detail::open_input(path);
  return read_signal(in, path);
}

inline void write_signal(std::ostream& out, const GraphSignal& f) {
  for (Index i = 0; i < f.size(); ++i) out << format_double(f[i]) << '\n';
}

/// "index value" pairs.
inline SampledSignal read_samples(std::istream& in, const std::string& source = "samples") {
  std::vector<Index> nodes;
  std::vector<double> values;
  detail::for_each_record(in, ' ', [&](const auto& f, std::size_t line) {
    if (f.size() != 2) detail::fail(source, line, "expected 'index value'");
    nodes.push_back(detail::parse_number<Index>(f[0], source, line));
    values.push_back(detail::parse_number<double>(f[1], source, line));
  });
  SampledSignal s;
  s.nodes = std::move(nodes);
  s.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  return s;
}

inline SampledSignal read_samples(const std::string& path) {
  auto in = detail::open_input(path);
  return read_samples(in, path);
}

inline void write_samples(std::ostream& out, const SampledSignal& s) {
  for (Index a = 0; a < s.size(); ++a)
    out << s.nodes[static_cast<std::size_t>(a)] << ' ' << format_double(s.values[a]) << '\n';
}

/// Node indices in selection order, then "# cutoffs: c1,c2,..." and "# k: k".
inline void write_sampling_set(std::ostream& out, const SamplingSet& set) {
  for (Index v : set.nodes) out << v << '\n';
  out << "# cutoffs: ";
  for (std::size_t t = 0; t < set.cutoffs.size(); ++t)
    out << (t ? "," : "") << format_double(set.cutoffs[t]);
  out << "\n# k: " << set.k << '\n';
}

inline SamplingSet read_sampling_set(std::istream& in, const std::string& source = "sampling set") {
  SamplingSet set;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const auto text = detail::trim(body.substr(1));
      if (text.rfind("cutoffs:", 0) == 0) {
        const auto list = detail::trim(text.substr(8));
        if (!list.empty())
          for (auto token : detail::split(list, ','))
            set.cutoffs.push_back(detail::parse_number<double>(token, source, number));
      } else if (text.rfind("k:", 0) == 0) {
        set.k = detail::parse_number<int>(detail::trim(text.substr(2)), source, number);
      }
      continue;
    }
    set.nodes.push_back(detail::parse_number<Index>(body, source, number));
  }
  return set;
}

inline SamplingSet read_sampling_set(const std::string& path) {
  auto in = detail::open_input(path);
  return read_sampling_set(in, path);
}

/// "node,predicted,score_0,...,score_{C-1}".
inline void write_predictions(std::ostream& out, const MembershipPrediction& p) {
  out << "node,predicted";
  for (Index c = 0; c < p.scores.cols(); ++c) out << ",score_" << c;
  out << '\n';
  for (Index i = 0; i < p.scores.rows(); ++i) {
    out << i << ',' << p.predicted[static_cast<std::size_t>(i)];
    for (Index c = 0; c < p.scores.cols(); ++c) out << ',' << format_double(p.scores(i, c));
    out << '\n';
  }
}

}  // namespace gsamp::io
