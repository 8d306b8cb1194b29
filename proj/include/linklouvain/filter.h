#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "linklouvain/graph.h"
#include "linklouvain/link_model.h"

namespace linklouvain {

enum class WeightMode { kScore, kUnit };

std::string to_string(WeightMode mode);
// "score" or "unit"; throws ConfigError otherwise.
WeightMode parse_weight_mode(const std::string& name);

struct FilterConfig {
  double gamma = 0.5;
  WeightMode weight_mode = WeightMode::kScore;
  // Hotspot degree cap applied to the filtered graph.
  std::optional<std::size_t> theta;
};

// Throws ConfigError when gamma is outside [0, 1] or theta is 0. Used for
// user-facing configuration.
void validate(const FilterConfig& cfg);

// Keeps edges with score >= gamma, weighted by score or 1. All nodes survive.
// Any finite gamma >= 0 is accepted here; gamma > 1 keeps nothing. Throws
// std::invalid_argument when an edge of g has no score, a score refers to a
// pair that is not an edge, or gamma is negative or NaN.
SocialGraph filter_by_score(const SocialGraph& g, const ScoredEdgeSet& scores,
                            const FilterConfig& cfg);

// Deletes every edge incident to a node whose degree in g exceeds theta.
// Degrees are read once from g, so the removal never cascades.
SocialGraph remove_hotspots(const SocialGraph& g, std::size_t theta);

// filter_by_score followed by remove_hotspots when cfg.theta is set.
SocialGraph apply_filter(const SocialGraph& g, const ScoredEdgeSet& scores,
                         const FilterConfig& cfg);

}  // namespace linklouvain
