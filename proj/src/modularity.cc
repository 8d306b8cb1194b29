#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "linklouvain/cluster.h"
#include "linklouvain/errors.h"

namespace linklouvain {

Clustering make_clustering(const std::vector<std::uint64_t>& labels) {
  Clustering c;
  c.assignment.resize(labels.size());
  std::unordered_map<std::uint64_t, ClusterId> dense;
  dense.reserve(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) {
    const auto [it, inserted] =
        dense.try_emplace(labels[v], static_cast<ClusterId>(c.cluster_sizes.size()));
    if (inserted) c.cluster_sizes.push_back(0);
    c.assignment[v] = it->second;
    ++c.cluster_sizes[it->second];
  }
  return c;
}

Clustering singleton_clustering(std::size_t n) {
  Clustering c;
  c.assignment.resize(n);
  for (std::size_t v = 0; v < n; ++v) c.assignment[v] = static_cast<ClusterId>(v);
  c.cluster_sizes.assign(n, 1);
  return c;
}

double modularity(const SocialGraph& g, const std::vector<ClusterId>& assignment,
                  double resolution) {
  if (assignment.size() != g.num_nodes()) {
    throw std::invalid_argument("modularity: assignment size does not match node count");
  }
  const double m2 = 2.0 * g.total_weight();
  if (!(m2 > 0.0)) throw NumericError("modularity undefined: graph has zero total edge weight");
  ClusterId max_id = 0;
  for (ClusterId c : assignment) max_id = std::max(max_id, c);
  std::vector<double> internal(assignment.empty() ? 0 : max_id + 1, 0.0);
  std::vector<double> total(internal.size(), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto nbrs = g.neighbors(v);
    const auto w = g.weights(v);
    double k = 0.0;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      k += w[i];
      if (assignment[nbrs[i]] == assignment[v]) internal[assignment[v]] += w[i];
    }
    total[assignment[v]] += k;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    q += internal[c] / m2 - resolution * (total[c] / m2) * (total[c] / m2);
  }
  return q;
}

namespace {

struct BruteForceSearch {
  std::size_t n = 0;
  double m2 = 0.0;
  double resolution = 1.0;
  std::vector<double> w;  // n x n
  std::vector<double> k;
  std::vector<ClusterId> current;
  std::vector<double> internal;  // ordered-pair internal weight per block
  std::vector<double> total;
  double best_q = -std::numeric_limits<double>::infinity();
  std::vector<ClusterId> best;

  void search(std::size_t i, std::size_t blocks) {
    if (i == n) {
      double q = 0.0;
      for (std::size_t c = 0; c < blocks; ++c) {
        q += internal[c] / m2 - resolution * (total[c] / m2) * (total[c] / m2);
      }
      // The margin keeps the lexicographically first optimum under ties.
      if (q > best_q + 1e-12) {
        best_q = q;
        best = current;
      }
      return;
    }
    std::vector<double> link(blocks + 1, 0.0);
    for (std::size_t j = 0; j < i; ++j) link[current[j]] += w[i * n + j];
    for (std::size_t c = 0; c <= blocks; ++c) {
      current[i] = static_cast<ClusterId>(c);
      internal[c] += 2.0 * link[c];
      total[c] += k[i];
      search(i + 1, c == blocks ? blocks + 1 : blocks);
      internal[c] -= 2.0 * link[c];
      total[c] -= k[i];
    }
  }
};

}  // namespace

Clustering brute_force_best_partition(const SocialGraph& g, double resolution) {
  const std::size_t n = g.num_nodes();
  if (n > kBruteForceMaxNodes) {
    throw std::invalid_argument("brute_force_best_partition: graph has " + std::to_string(n) +
                                " nodes, limit is " + std::to_string(kBruteForceMaxNodes));
  }
  if (!(g.total_weight() > 0.0)) {
    throw NumericError("modularity undefined: graph has zero total edge weight");
  }
  BruteForceSearch s;
  s.n = n;
  s.m2 = 2.0 * g.total_weight();
  s.resolution = resolution;
  s.w.assign(n * n, 0.0);
  s.k.assign(n, 0.0);
  g.for_each_edge([&](NodeId u, NodeId v, double wt) {
    s.w[u * n + v] = wt;
    s.w[v * n + u] = wt;
    s.k[u] += wt;
    s.k[v] += wt;
  });
  s.current.assign(n, 0);
  s.internal.assign(n + 1, 0.0);
  s.total.assign(n + 1, 0.0);
  s.search(0, 0);

  std::vector<std::uint64_t> labels(s.best.begin(), s.best.end());
  Clustering c = make_clustering(labels);
  c.modularity = modularity(g, c.assignment, resolution);
  return c;
}

void write_clustering(const Clustering& c, const SocialGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (NodeId v = 0; v < c.assignment.size(); ++v) {
    out << g.external_id(v) << '\t' << c.assignment[v] << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

Clustering load_clustering(const std::string& path, const SocialGraph& g) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open input file: " + path);
  std::vector<std::uint64_t> labels(g.num_nodes(), std::numeric_limits<std::uint64_t>::max());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, line_no, "expected node<TAB>cluster");
    try {
      std::size_t used = 0;
      const long long node = std::stoll(line.substr(0, tab), &used);
      const unsigned long long cluster = std::stoull(line.substr(tab + 1));
      labels[g.dense_id(node)] = cluster;
    } catch (const std::out_of_range& e) {
      throw ParseError(path, line_no, std::string("unknown node or id out of range: ") + e.what());
    } catch (const std::invalid_argument&) {
      throw ParseError(path, line_no, "malformed row");
    }
  }
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == std::numeric_limits<std::uint64_t>::max()) {
      throw ParseError(path, line_no,
                       "node " + std::to_string(g.external_id(static_cast<NodeId>(v))) +
                           " has no cluster");
    }
  }
  Clustering c = make_clustering(labels);
  if (g.total_weight() > 0.0) c.modularity = modularity(g, c.assignment);
  return c;
}

nlohmann::json clustering_summary(const Clustering& c) {
  std::map<std::size_t, std::size_t> histogram;
  std::size_t largest = 0;
  for (std::size_t s : c.cluster_sizes) {
    ++histogram[s];
    largest = std::max(largest, s);
  }
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [size, count] : histogram) hist.push_back({{"size", size}, {"count", count}});
  return {{"cluster_count", c.num_clusters()},
          {"node_count", c.num_nodes()},
          {"largest_cluster", largest},
          {"modularity", c.modularity},
          {"modularity_trace", c.modularity_trace},
          {"size_histogram", hist}};
}

}  // namespace linklouvain
