#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "linklouvain/comparison.h"

namespace linklouvain {

enum class ClusterMethod { kLouvain, kLabelPropagation };

// Every tunable of every stage. Serializes to a nested JSON object whose
// sections are graph, response, linkpred, filter, cluster, assign, metrics and
// compare.
struct RunConfig {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  GraphGenSpec graph;
  ResponseModel response;
  TrainConfig train;
  int pilot_day = 2;
  double holdout_fraction = 0.2;

  FilterConfig filter;

  ClusterMethod cluster_method = ClusterMethod::kLouvain;
  ModularityParams louvain;
  std::size_t lp_max_iters = 100;

  std::size_t groups = 2;
  MergeMode merge = MergeMode::kSizeBalanced;

  double variance_traffic = 0.01;
  std::size_t exposure_bins = 10;
  // Label-graph day for interference; negative means the horizon.
  int metrics_day = -1;
  std::size_t degree_buckets = 20;

  std::vector<Method> methods = all_methods();
  std::vector<std::uint64_t> seeds;
  std::size_t num_seeds = 1;
  std::size_t hotspot_theta = 40;
  bool include_timing = true;
  std::string run_dir;
};

RunConfig default_config();

// Overlays `doc` onto `c`. Throws ConfigError naming the key on unknown keys,
// wrong types or invalid values.
void apply_config(RunConfig& c, const nlohmann::json& doc);

// Parses either a JSON object or `section.key = value` lines ('#' comments).
// Values in key-value form are read as JSON when possible, else as strings.
nlohmann::json parse_config_text(const std::string& text, const std::string& origin);

// Loads a config file. A bare name without a file on disk may refer to a
// bundled config ("demo"). Throws MissingInputError when neither exists.
nlohmann::json load_config_document(const std::string& path_or_name);
// The bundled configs, by name.
std::optional<std::string> builtin_config(const std::string& name);

nlohmann::json to_json(const RunConfig& c);

// Seeds for `compare`: the explicit list when given, otherwise seed,
// seed + 1, ... (num_seeds entries).
std::vector<std::uint64_t> comparison_seeds(const RunConfig& c);
ComparisonSpec comparison_spec(const RunConfig& c);

}  // namespace linklouvain
