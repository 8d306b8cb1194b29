#include "linklouvain/generate.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "linklouvain/errors.h"
#include "linklouvain/random.h"

namespace linklouvain {

std::string to_string(GraphModel model) {
  switch (model) {
    case GraphModel::kPreferentialAttachment:
      return "preferential_attachment";
    case GraphModel::kPlantedBlocks:
      return "planted_blocks";
    case GraphModel::kHybrid:
      return "hybrid";
  }
  return "unknown";
}

GraphModel parse_graph_model(const std::string& name) {
  if (name == "preferential_attachment") return GraphModel::kPreferentialAttachment;
  if (name == "planted_blocks") return GraphModel::kPlantedBlocks;
  if (name == "hybrid") return GraphModel::kHybrid;
  throw ConfigError("unknown graph model '" + name +
                    "' (expected preferential_attachment, planted_blocks, hybrid)");
}

void validate(const GraphGenSpec& spec) {
  if (spec.n < 2) throw ConfigError("graph.n must be >= 2");
  if (spec.n > std::numeric_limits<NodeId>::max()) throw ConfigError("graph.n too large");
  auto probability = [](double p, const char* key) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(key) + " must lie in [0, 1]");
  };
  probability(spec.p_in, "graph.p_in");
  probability(spec.p_out, "graph.p_out");
  if (spec.model != GraphModel::kPlantedBlocks && (spec.m == 0 || spec.m >= spec.n)) {
    throw ConfigError("graph.m must satisfy 1 <= m < n");
  }
  if (!(spec.activity_exponent > 2.0)) throw ConfigError("graph.activity_exponent must be > 2");
  if (spec.model == GraphModel::kPlantedBlocks && (spec.blocks == 0 || spec.blocks > spec.n)) {
    throw ConfigError("graph.blocks must lie in [1, n]");
  }
  if (spec.model == GraphModel::kHybrid && spec.block_size == 0) {
    throw ConfigError("graph.block_size must be >= 1");
  }
  if (spec.regions == 0) throw ConfigError("graph.regions must be >= 1");
  if (!std::isfinite(spec.feature_signal) || !std::isfinite(spec.degree_signal)) {
    throw ConfigError("feature signal strengths must be finite");
  }
}

std::uint32_t region_of(std::size_t v, std::size_t n, std::size_t regions) {
  return static_cast<std::uint32_t>((static_cast<unsigned __int128>(v) * regions) / n);
}

std::vector<std::uint32_t> region_map(std::size_t n, std::size_t regions) {
  if (regions == 0 || regions > n) throw std::invalid_argument("regions must lie in [1, n]");
  std::vector<std::uint32_t> r(n);
  for (std::size_t v = 0; v < n; ++v) r[v] = region_of(v, n, regions);
  return r;
}

namespace {

// Calls emit(i, j), j < i < size, for each pair kept with probability p, using
// geometric skips over the lower-triangle pair sequence.
template <typename Emit>
void sample_pairs(std::size_t size, double p, Rng& rng, Emit&& emit) {
  if (p <= 0.0 || size < 2) return;
  if (p >= 1.0) {
    for (std::size_t i = 1; i < size; ++i) {
      for (std::size_t j = 0; j < i; ++j) emit(i, j);
    }
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::size_t v = 1;
  long double w = -1;
  while (v < size) {
    const double r = unit(rng);
    w += 1 + std::floor(std::log1p(-r) / log_q);
    while (w >= static_cast<long double>(v) && v < size) {
      w -= static_cast<long double>(v);
      ++v;
    }
    if (v < size) emit(v, static_cast<std::size_t>(w));
  }
}

// Scale of a Pareto(x_min, a) variable capped at `cap` so that its mean is
// `target`: E[min(X, cap)] = x_min + x_min / (a - 1) * (1 - (x_min / cap)^(a - 1)).
double pareto_scale(double target, double a, double cap) {
  auto mean = [&](double x) {
    if (x >= cap) return cap;
    return x + x / (a - 1.0) * (1.0 - std::pow(x / cap, a - 1.0));
  };
  double lo = 1e-9, hi = cap;
  if (mean(hi) <= target) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void attachment_layer(const GraphGenSpec& spec, Rng& rng, std::vector<WeightedEdge>& edges) {
  const std::size_t n = spec.n;
  const double a = spec.activity_exponent - 1.0;
  const auto cap = static_cast<double>(
      spec.activity_cap > 0 ? spec.activity_cap
                            : std::max<std::size_t>(spec.m, static_cast<std::size_t>(
                                                                2.0 * std::sqrt(double(n)))));
  const double scale = pareto_scale(static_cast<double>(spec.m), a, cap);

  std::vector<NodeId> arrival(n);
  std::iota(arrival.begin(), arrival.end(), NodeId{0});
  shuffle_in_place(arrival, rng);
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * spec.m * n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<NodeId> chosen;
  for (std::size_t idx = 1; idx < n; ++idx) {
    const NodeId v = arrival[idx];
    const double draw = scale * std::pow(1.0 - unit(rng), -1.0 / a);
    const auto k = std::min<std::size_t>(
        idx, static_cast<std::size_t>(std::clamp(std::round(draw), 1.0, cap)));
    chosen.clear();
    for (std::size_t attempt = 0; chosen.size() < k && attempt < 20 * k + 20; ++attempt) {
      NodeId t;
      if (endpoints.empty()) {
        t = arrival[std::uniform_int_distribution<std::size_t>(0, idx - 1)(rng)];
      } else {
        t = endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng)];
      }
      if (t == v || std::find(chosen.begin(), chosen.end(), t) != chosen.end()) continue;
      chosen.push_back(t);
    }
    for (NodeId t : chosen) {
      edges.push_back({v, t, 1.0});
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
}

}  // namespace

GeneratedGraph generate_graph(const GraphGenSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n;
  GeneratedGraph out;
  out.block.assign(n, 0);
  out.num_blocks = 1;
  if (spec.model == GraphModel::kPlantedBlocks) {
    out.num_blocks = spec.blocks;
    for (std::size_t v = 0; v < n; ++v) out.block[v] = region_of(v, n, spec.blocks);
  } else if (spec.model == GraphModel::kHybrid) {
    out.num_blocks = (n + spec.block_size - 1) / spec.block_size;
    for (std::size_t v = 0; v < n; ++v) out.block[v] = static_cast<std::uint32_t>(v / spec.block_size);
  }
  out.region = region_map(n, std::min(spec.regions, n));

  std::vector<WeightedEdge> edges;
  Rng block_rng(derive_seed(spec.seed, 1));
  if (spec.model != GraphModel::kPreferentialAttachment) {
    // Within-block edges, block by block.
    std::size_t start = 0;
    while (start < n) {
      std::size_t end = start + 1;
      while (end < n && out.block[end] == out.block[start]) ++end;
      sample_pairs(end - start, spec.p_in, block_rng, [&](std::size_t i, std::size_t j) {
        edges.push_back({static_cast<NodeId>(start + i), static_cast<NodeId>(start + j), 1.0});
      });
      start = end;
    }
    Rng cross_rng(derive_seed(spec.seed, 2));
    sample_pairs(n, spec.p_out, cross_rng, [&](std::size_t i, std::size_t j) {
      if (out.block[i] != out.block[j]) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
      }
    });
  }
  if (spec.model != GraphModel::kPlantedBlocks) {
    Rng pa_rng(derive_seed(spec.seed, 3));
    attachment_layer(spec, pa_rng, edges);
  }
  SocialGraph g = SocialGraph::from_edges(n, std::move(edges));

  FeatureMatrix f{n, spec.feature_dim, std::vector<double>(n * spec.feature_dim, 0.0)};
  if (spec.feature_dim > 0) {
    Rng feature_rng(derive_seed(spec.seed, 4));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> centroids(out.num_blocks * spec.feature_dim);
    for (double& c : centroids) c = normal(feature_rng);
    std::vector<double> log_degree(n);
    double mean = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      log_degree[v] = std::log1p(static_cast<double>(g.degree(v)));
      mean += log_degree[v];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : log_degree) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (NodeId v = 0; v < n; ++v) {
      auto row = f.row(v);
      const double* c = centroids.data() + out.block[v] * spec.feature_dim;
      for (std::size_t j = 0; j < spec.feature_dim; ++j) {
        row[j] = spec.feature_signal * c[j] + normal(feature_rng);
      }
      if (sd > 0.0) row[0] += spec.degree_signal * (log_degree[v] - mean) / sd;
    }
  }
  out.graph = g.with_features(std::move(f));
  return out;
}

}  // namespace linklouvain
