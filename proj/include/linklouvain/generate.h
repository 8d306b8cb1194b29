#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "linklouvain/graph.h"

namespace linklouvain {

enum class GraphModel { kPreferentialAttachment, kPlantedBlocks, kHybrid };

std::string to_string(GraphModel model);
// "preferential_attachment", "planted_blocks" or "hybrid"; throws ConfigError.
GraphModel parse_graph_model(const std::string& name);

// Synthetic social graph parameters.
//
// preferential_attachment: nodes arrive in random order; each arrival draws an
//   activity k (power law with the given exponent, mean about m, capped) and
//   links to k earlier nodes chosen proportionally to degree.
// planted_blocks: `blocks` equal contiguous blocks, p_in inside, p_out across.
// hybrid: contiguous blocks of block_size with p_in inside, the attachment
//   layer above over all nodes, and p_out random cross edges.
struct GraphGenSpec {
  GraphModel model = GraphModel::kHybrid;
  std::size_t n = 100000;
  std::size_t m = 8;
  double activity_exponent = 2.2;
  // 0 selects 2 * sqrt(n).
  std::size_t activity_cap = 0;
  std::size_t blocks = 4;
  std::size_t block_size = 10;
  double p_in = 0.6;
  double p_out = 0.0;
  // Clamped to n.
  std::size_t regions = 346;
  std::size_t feature_dim = 16;
  // Scale of the per-block feature centroid relative to unit noise.
  double feature_signal = 1.0;
  // Weight of the standardized log-degree added to feature 0.
  double degree_signal = 1.0;
  std::uint64_t seed = 0;
};

// Throws ConfigError on n < 2, m >= n, probabilities outside [0, 1], a zero
// block count/size, or regions == 0.
void validate(const GraphGenSpec& spec);

struct GeneratedGraph {
  SocialGraph graph;  // carries the node features
  std::vector<std::uint32_t> block;
  std::vector<std::uint32_t> region;
  std::size_t num_blocks = 0;
};

// Deterministic given spec.seed.
GeneratedGraph generate_graph(const GraphGenSpec& spec);

// Contiguous id ranges: floor(v * regions / n). Blocks are contiguous too, so
// regions are unions of whole blocks up to boundary effects.
std::uint32_t region_of(std::size_t v, std::size_t n, std::size_t regions);
std::vector<std::uint32_t> region_map(std::size_t n, std::size_t regions);

}  // namespace linklouvain
