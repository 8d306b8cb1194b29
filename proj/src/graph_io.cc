#include "linklouvain/graph_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string_view>
#include <vector>

#include "linklouvain/errors.h"
#include "text_io.h"

namespace linklouvain {
namespace {

using namespace detail;

constexpr std::string_view kNodeDirective = "#@node\t";

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

EdgeListLoad load_edge_list(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<ExternalId> src, dst;
  std::vector<double> weight;
  std::vector<ExternalId> declared;
  EdgeListLoad result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (view.substr(0, kNodeDirective.size()) == kNodeDirective) {
        declared.push_back(
            require_int(path, line_no, view.substr(kNodeDirective.size()), "node id"));
      }
      continue;
    }
    const auto fields = split_fields(view, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(path, line_no, "expected src<TAB>dst[<TAB>weight]");
    }
    const ExternalId a = require_int(path, line_no, fields[0], "source id");
    const ExternalId b = require_int(path, line_no, fields[1], "destination id");
    double w = 1.0;
    if (fields.size() == 3) {
      if (!parse_double(fields[2], w) || !std::isfinite(w) || w < 0.0) {
        throw ParseError(path, line_no,
                         "invalid weight '" + std::string(fields[2]) + "'");
      }
    }
    ++result.rows;
    if (a == b) {
      ++result.self_loops_dropped;
      // The endpoint still belongs to the node set.
      declared.push_back(a);
      continue;
    }
    src.push_back(a);
    dst.push_back(b);
    weight.push_back(w);
  }

  std::vector<ExternalId> ids;
  ids.reserve(src.size() * 2 + declared.size());
  ids.insert(ids.end(), src.begin(), src.end());
  ids.insert(ids.end(), dst.begin(), dst.end());
  ids.insert(ids.end(), declared.begin(), declared.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > std::numeric_limits<NodeId>::max()) {
    throw ParseError(path, line_no, "too many distinct node ids for 32-bit dense ids");
  }

  auto dense = [&](ExternalId id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<WeightedEdge> edges(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    edges[i] = {dense(src[i]), dense(dst[i]), weight[i]};
  }
  const std::size_t rows_kept = edges.size();
  src.clear();
  src.shrink_to_fit();
  dst.clear();
  dst.shrink_to_fit();
  weight.clear();
  weight.shrink_to_fit();
  const std::size_t n = ids.size();
  result.graph = SocialGraph::from_edges(n, std::move(edges), std::move(ids));
  result.duplicates_collapsed = rows_kept - result.graph.num_edges();
  return result;
}

void write_edge_list(const SocialGraph& g, const std::string& path) {
  std::ofstream out = open_output(path);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.degree(v) == 0) out << kNodeDirective << g.external_id(v) << '\n';
  }
  g.for_each_edge([&](NodeId u, NodeId v, double w) {
    out << g.external_id(u) << '\t' << g.external_id(v) << '\t' << format_double(w) << '\n';
  });
  if (!out) throw std::runtime_error("failed writing " + path);
}

LabelGraph load_label_graph(const std::string& path, const SocialGraph& g, int horizon) {
  std::ifstream in = open_input(path);
  std::vector<LabelEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  int max_day = horizon;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split_fields(view, '\t');
    if (fields.size() != 3) throw ParseError(path, line_no, "expected src<TAB>dst<TAB>day");
    const ExternalId a = require_int(path, line_no, fields[0], "source id");
    const ExternalId b = require_int(path, line_no, fields[1], "destination id");
    const ExternalId day = require_int(path, line_no, fields[2], "day");
    if (day < 0 || day > std::numeric_limits<int>::max()) {
      throw ParseError(path, line_no, "day out of range");
    }
    NodeId u = 0, v = 0;
    try {
      u = g.dense_id(a);
      v = g.dense_id(b);
    } catch (const std::out_of_range& e) {
      throw ParseError(path, line_no, std::string("label edge endpoint: ") + e.what());
    }
    if (u == v) throw ParseError(path, line_no, "label edge is a self-loop");
    edges.push_back({u, v, static_cast<int>(day)});
    max_day = std::max(max_day, static_cast<int>(day));
  }
  return LabelGraph(g.num_nodes(), max_day, std::move(edges));
}

void write_label_graph(const LabelGraph& l, const SocialGraph& g, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& e : l.edges()) {
    out << g.external_id(e.u) << '\t' << g.external_id(e.v) << '\t' << e.day << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

FeatureMatrix load_features(const std::string& path) {
  std::ifstream in = open_input(path);
  FeatureMatrix f;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view, ',');
    if (f.rows == 0) {
      f.dim = fields.size();
    } else if (fields.size() != f.dim) {
      throw ParseError(path, line_no, "expected " + std::to_string(f.dim) + " columns");
    }
    for (auto field : fields) {
      double x = 0.0;
      if (!parse_double(field, x) || !std::isfinite(x)) {
        throw ParseError(path, line_no, "invalid feature value '" + std::string(field) + "'");
      }
      f.values.push_back(x);
    }
    ++f.rows;
  }
  return f;
}

void write_features(const FeatureMatrix& f, const std::string& path) {
  std::ofstream out = open_output(path);
  for (std::size_t i = 0; i < f.rows; ++i) {
    const auto row = f.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace linklouvain
