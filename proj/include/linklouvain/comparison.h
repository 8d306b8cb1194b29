#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "linklouvain/assign.h"
#include "linklouvain/campaign.h"
#include "linklouvain/cluster.h"
#include "linklouvain/filter.h"
#include "linklouvain/generate.h"
#include "linklouvain/link_training.h"

namespace linklouvain {

enum class Method {
  kUserLevel,
  kGeoSynthetic,
  kLouvainOracle,
  kLinkLouvain,
  kLinkLouvainUW,
  kHRLouvain,
  kLinkLabel,
};

std::string to_string(Method m);
// user_level, geo_synthetic, louvain_oracle, linklouvain, linklouvain_uw,
// hrlouvain, linklabel. Throws ConfigError otherwise.
Method parse_method(const std::string& name);
std::vector<Method> all_methods();
bool needs_link_scores(Method m);

// Clusters = coarse regions floor(v * regions / n), merged into groups.
// Throws std::invalid_argument when regions < 2 or regions > n.
GroupAssignment geo_synthetic_assignment(const SocialGraph& g, std::size_t regions,
                                         std::uint64_t seed, std::size_t groups = 2,
                                         MergeMode mode = MergeMode::kSizeBalanced);

struct ComparisonSpec {
  GraphGenSpec graph;
  ResponseModel response;
  TrainConfig train;
  // Day of the pilot campaign whose label snapshot trains the link model.
  int pilot_day = 2;
  double gamma = 0.5;
  std::size_t theta = 40;
  std::size_t groups = 2;
  MergeMode merge = MergeMode::kSizeBalanced;
  ModularityParams louvain;
  std::size_t lp_max_iters = 100;
  // Group size, as a share of all nodes, at which Var(Y) is evaluated.
  double variance_traffic = 0.01;
  bool include_timing = true;
  // When non-empty, per-run artifacts are written under this directory.
  std::string run_dir;
};

struct ComparisonRow {
  Method method = Method::kUserLevel;
  std::uint64_t seed = 0;
  std::size_t clusters = 0;
  double interference = 0.0;
  double variance = 0.0;
  double ate_hat = 0.0;
  double true_ate = 0.0;
  double abs_bias = 0.0;
  double seconds = 0.0;
  // Holds "<stage>: <message>" when a stage failed; metrics are then NaN.
  std::string error;
};

// Runs every method for every seed. Each seed generates its own graph, pilot
// campaign and link model; all methods of a seed share the campaign's random
// numbers. Rows come out seed-major in the order given.
std::vector<ComparisonRow> run_comparison(const ComparisonSpec& spec,
                                          const std::vector<Method>& methods,
                                          const std::vector<std::uint64_t>& seeds);

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path,
                          bool include_timing = true);
nlohmann::json to_json(const std::vector<ComparisonRow>& rows, bool include_timing = true);

}  // namespace linklouvain
