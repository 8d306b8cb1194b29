#include "linklouvain/graph_stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "linklouvain/random.h"

namespace linklouvain {

DegreeHistogram degree_distribution(const SocialGraph& g, std::size_t buckets) {
  if (buckets == 0) throw std::invalid_argument("degree_distribution: buckets must be >= 1");
  DegreeHistogram h;
  const std::size_t n = g.num_nodes();
  h.node_count = n;
  h.max_degree = g.max_degree();
  h.counts.assign(buckets, 0);

  const double lo = 1.0;
  const double hi = static_cast<double>(h.max_degree) + 1.0;
  h.edges.resize(buckets + 1);
  for (std::size_t k = 0; k <= buckets; ++k) {
    h.edges[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(buckets));
  }
  h.edges[0] = 0.0;
  h.edges[buckets] = hi;

  std::vector<std::size_t> degrees(n);
  double sum = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t d = g.degree(v);
    degrees[v] = d;
    sum += static_cast<double>(d);
    // upper_bound over interior edges keeps the mapping exact at boundaries.
    const auto it = std::upper_bound(h.edges.begin() + 1, h.edges.end() - 1,
                                     static_cast<double>(d));
    h.counts[static_cast<std::size_t>(it - (h.edges.begin() + 1))]++;
  }
  if (n > 0) {
    h.mean_degree = sum / static_cast<double>(n);
    std::sort(degrees.begin(), degrees.end());
    h.median_degree = n % 2 == 1 ? static_cast<double>(degrees[n / 2])
                                 : 0.5 * static_cast<double>(degrees[n / 2 - 1] + degrees[n / 2]);
    h.right_skew = h.median_degree > 0.0 ? h.mean_degree / h.median_degree : 0.0;
  }
  return h;
}

namespace {

// Bounded BFS that reuses caller-owned scratch space.
void bfs_ball_sizes(const SocialGraph& g, NodeId source, std::size_t r_max,
                    std::vector<std::uint32_t>& stamp, std::uint32_t epoch,
                    std::vector<NodeId>& frontier, std::vector<NodeId>& next,
                    std::vector<std::size_t>& sizes) {
  sizes.assign(r_max + 1, 0);
  frontier.assign(1, source);
  stamp[source] = epoch;
  std::size_t total = 1;
  sizes[0] = 1;
  for (std::size_t r = 1; r <= r_max; ++r) {
    next.clear();
    for (NodeId v : frontier) {
      for (NodeId u : g.neighbors(v)) {
        if (stamp[u] != epoch) {
          stamp[u] = epoch;
          next.push_back(u);
        }
      }
    }
    total += next.size();
    sizes[r] = total;
    frontier.swap(next);
  }
}

}  // namespace

std::vector<std::size_t> ball_sizes(const SocialGraph& g, NodeId v, std::size_t r_max) {
  if (v >= g.num_nodes()) throw std::out_of_range("ball_sizes: unknown node");
  std::vector<std::uint32_t> stamp(g.num_nodes(), 0);
  std::vector<NodeId> frontier, next;
  std::vector<std::size_t> sizes;
  bfs_ball_sizes(g, v, r_max, stamp, 1, frontier, next, sizes);
  return sizes;
}

GrowthProfile neighborhood_growth(const SocialGraph& g, std::size_t r_max,
                                  std::size_t sample, std::uint64_t seed) {
  if (r_max == 0) throw std::invalid_argument("neighborhood_growth: r_max must be >= 1");
  if (sample == 0) throw std::invalid_argument("neighborhood_growth: sample must be >= 1");
  GrowthProfile p;
  p.r_max = r_max;
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  if (sample < n) {
    Rng rng(seed);
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < sample; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(nodes[i], nodes[pick(rng)]);
    }
    nodes.resize(sample);
    std::sort(nodes.begin(), nodes.end());
  }
  p.sampled_nodes = nodes;
  p.mean_ratio.assign(r_max, 0.0);
  p.max_ratio.assign(r_max, 0.0);

  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<NodeId> frontier, next;
  std::uint32_t epoch = 0;
  for (NodeId v : nodes) {
    std::vector<std::size_t> sizes;
    bfs_ball_sizes(g, v, r_max + 1, stamp, ++epoch, frontier, next, sizes);
    for (std::size_t r = 1; r <= r_max; ++r) {
      const double ratio = static_cast<double>(sizes[r + 1]) / static_cast<double>(sizes[r]);
      p.mean_ratio[r - 1] += ratio;
      p.max_ratio[r - 1] = std::max(p.max_ratio[r - 1], ratio);
    }
    p.ball_sizes.push_back(std::move(sizes));
  }
  if (!nodes.empty()) {
    for (double& m : p.mean_ratio) m /= static_cast<double>(nodes.size());
  }
  return p;
}

nlohmann::json to_json(const DegreeHistogram& h) {
  return {{"bucket_edges", h.edges},     {"counts", h.counts},
          {"max_degree", h.max_degree},  {"node_count", h.node_count},
          {"mean_degree", h.mean_degree}, {"median_degree", h.median_degree},
          {"right_skew", h.right_skew}};
}

nlohmann::json to_json(const GrowthProfile& p) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 1; r <= p.r_max; ++r) {
    rows.push_back({{"r", r},
                    {"mean_ratio", p.mean_ratio[r - 1]},
                    {"max_ratio", p.max_ratio[r - 1]}});
  }
  return {{"r_max", p.r_max},
          {"sample", p.sampled_nodes.size()},
          {"ratios", rows},
          {"ball_sizes", p.ball_sizes}};
}

}  // namespace linklouvain
