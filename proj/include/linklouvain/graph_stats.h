#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "linklouvain/graph.h"

namespace linklouvain {

// Log-spaced degree histogram. Bucket k covers [edges[k], edges[k+1]);
// isolated nodes fall in bucket 0.
struct DegreeHistogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t max_degree = 0;
  std::size_t node_count = 0;
  double mean_degree = 0.0;
  double median_degree = 0.0;
  // mean / median; 0 when the median is 0.
  double right_skew = 0.0;
};

// Throws std::invalid_argument when buckets == 0.
DegreeHistogram degree_distribution(const SocialGraph& g, std::size_t buckets);

// Closed-ball sizes |B_0(v)|, ..., |B_{r_max}(v)|.
std::vector<std::size_t> ball_sizes(const SocialGraph& g, NodeId v, std::size_t r_max);

struct GrowthProfile {
  std::size_t r_max = 0;
  std::vector<NodeId> sampled_nodes;
  // ball_sizes[i][r] = |B_r(sampled_nodes[i])| for r in [0, r_max + 1].
  std::vector<std::vector<std::size_t>> ball_sizes;
  // Index r - 1 holds statistics of |B_{r+1}| / |B_r| for r in [1, r_max].
  std::vector<double> mean_ratio;
  std::vector<double> max_ratio;
};

// BFS from `sample` nodes drawn uniformly without replacement (all nodes when
// sample >= n). Throws std::invalid_argument when r_max or sample is 0.
GrowthProfile neighborhood_growth(const SocialGraph& g, std::size_t r_max,
                                  std::size_t sample, std::uint64_t seed);

nlohmann::json to_json(const DegreeHistogram& h);
nlohmann::json to_json(const GrowthProfile& p);

}  // namespace linklouvain
