#include "linklouvain/filter.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "linklouvain/errors.h"

namespace linklouvain {

std::string to_string(WeightMode mode) { return mode == WeightMode::kScore ? "score" : "unit"; }

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "score") return WeightMode::kScore;
  if (name == "unit") return WeightMode::kUnit;
  throw ConfigError("unknown weight mode '" + name + "' (expected score or unit)");
}

void validate(const FilterConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) {
    throw ConfigError("gamma must lie in [0, 1]");
  }
  if (cfg.theta && *cfg.theta < 1) throw ConfigError("theta must be >= 1");
}

SocialGraph filter_by_score(const SocialGraph& g, const ScoredEdgeSet& scores,
                            const FilterConfig& cfg) {
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
    throw std::invalid_argument("gamma must be finite and >= 0");
  }
  const auto& offsets = g.upper_offsets();
  const std::size_t m = g.num_edges();
  std::vector<double> by_index(m, std::nan(""));
  for (const auto& e : scores.edges) {
    NodeId u = e.u, v = e.v;
    if (u > v) std::swap(u, v);
    if (v >= g.num_nodes()) throw std::invalid_argument("score refers to an unknown node");
    const auto nbrs = g.neighbors(u);
    const auto it = std::lower_bound(nbrs.begin() + static_cast<std::ptrdiff_t>(g.upper_begin(u)),
                                     nbrs.end(), v);
    if (it == nbrs.end() || *it != v) {
      throw std::invalid_argument("score refers to a pair that is not an edge");
    }
    const std::size_t index =
        offsets[u] + static_cast<std::size_t>(it - nbrs.begin()) - g.upper_begin(u);
    by_index[index] = e.score;
  }
  std::vector<WeightedEdge> kept;
  std::size_t index = 0;
  g.for_each_edge([&](NodeId u, NodeId v, double) {
    const double s = by_index[index++];
    if (std::isnan(s)) {
      throw std::invalid_argument("edge " + std::to_string(g.external_id(u)) + "-" +
                                  std::to_string(g.external_id(v)) + " has no score");
    }
    if (s >= cfg.gamma) kept.push_back({u, v, cfg.weight_mode == WeightMode::kScore ? s : 1.0});
  });
  SocialGraph out = SocialGraph::from_edges(g.num_nodes(), std::move(kept), g.external_ids());
  return g.has_features() ? out.with_features(g.feature_matrix()) : out;
}

SocialGraph remove_hotspots(const SocialGraph& g, std::size_t theta) {
  if (theta < 1) throw std::invalid_argument("theta must be >= 1");
  std::vector<WeightedEdge> kept;
  g.for_each_edge([&](NodeId u, NodeId v, double w) {
    if (g.degree(u) <= theta && g.degree(v) <= theta) kept.push_back({u, v, w});
  });
  SocialGraph out = SocialGraph::from_edges(g.num_nodes(), std::move(kept), g.external_ids());
  return g.has_features() ? out.with_features(g.feature_matrix()) : out;
}

SocialGraph apply_filter(const SocialGraph& g, const ScoredEdgeSet& scores,
                         const FilterConfig& cfg) {
  SocialGraph filtered = filter_by_score(g, scores, cfg);
  return cfg.theta ? remove_hotspots(filtered, *cfg.theta) : filtered;
}

}  // namespace linklouvain
