#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "linklouvain/graph.h"

namespace linklouvain {

using ClusterId = std::uint32_t;

// Node -> cluster map with dense, contiguous cluster ids. Ids are assigned in
// order of the smallest member node, so equal partitions compare equal.
struct Clustering {
  std::vector<ClusterId> assignment;
  std::vector<std::size_t> cluster_sizes;
  double modularity = 0.0;
  // Modularity after each completed Louvain pass (empty for other methods).
  std::vector<double> modularity_trace;

  std::size_t num_clusters() const { return cluster_sizes.size(); }
  std::size_t num_nodes() const { return assignment.size(); }
};

// Relabels an arbitrary labeling into canonical dense ids and fills sizes.
Clustering make_clustering(const std::vector<std::uint64_t>& labels);
Clustering singleton_clustering(std::size_t n);

struct ModularityParams {
  double resolution = 1.0;
  double min_gain = 1e-7;
  std::size_t max_passes = 20;
  std::uint64_t seed = 0;
};

// Q = (1/2m) sum_ij [A_ij - resolution k_i k_j / 2m] delta(c_i, c_j).
// Throws NumericError when the graph has zero total weight and
// std::invalid_argument when the assignment size mismatches.
double modularity(const SocialGraph& g, const std::vector<ClusterId>& assignment,
                  double resolution = 1.0);

// Sequential two-phase Louvain. Node visit order is a seeded shuffle per
// pass; ties keep the current community, otherwise prefer the smallest
// community id. Returns singletons for an edgeless graph.
Clustering louvain(const SocialGraph& g, const ModularityParams& params = {});

// Sequential label propagation in seeded random order; each node adopts the
// label with the largest total edge weight among its neighbors, ties to the
// smallest label. Stops at a fixed point or after max_iters sweeps.
Clustering label_propagation(const SocialGraph& g, std::uint64_t seed,
                             std::size_t max_iters = 100);

// Exact maximum-modularity partition by enumerating all set partitions.
// Throws std::invalid_argument when n > kBruteForceMaxNodes and NumericError
// on zero total weight.
inline constexpr std::size_t kBruteForceMaxNodes = 12;
Clustering brute_force_best_partition(const SocialGraph& g, double resolution = 1.0);

// `node_id<TAB>cluster_id` text with external node ids.
void write_clustering(const Clustering& c, const SocialGraph& g, const std::string& path);
Clustering load_clustering(const std::string& path, const SocialGraph& g);
nlohmann::json clustering_summary(const Clustering& c);

}  // namespace linklouvain
