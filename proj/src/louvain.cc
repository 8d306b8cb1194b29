#include <algorithm>
#include <limits>
#include <numeric>

#include "linklouvain/cluster.h"
#include "linklouvain/random.h"

namespace linklouvain {
namespace {

// Weighted graph of the current Louvain level. loops[v] holds the
// ordered-pair weight of v's self-loop (twice the undirected internal weight
// of the community v stands for).
struct LevelGraph {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> targets;
  std::vector<double> weights;
  std::vector<double> loops;
  std::vector<double> degree;  // includes loops

  std::size_t size() const { return loops.size(); }
};

LevelGraph level_from(const SocialGraph& g) {
  LevelGraph lg;
  const std::size_t n = g.num_nodes();
  lg.offsets.resize(n + 1, 0);
  lg.targets.reserve(2 * g.num_edges());
  lg.weights.reserve(2 * g.num_edges());
  lg.loops.assign(n, 0.0);
  lg.degree.assign(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    const auto nbrs = g.neighbors(v);
    const auto w = g.weights(v);
    lg.targets.insert(lg.targets.end(), nbrs.begin(), nbrs.end());
    lg.weights.insert(lg.weights.end(), w.begin(), w.end());
    lg.offsets[v + 1] = lg.targets.size();
    double k = 0.0;
    for (double x : w) k += x;
    lg.degree[v] = k;
  }
  return lg;
}

double level_modularity(const LevelGraph& lg, const std::vector<std::uint32_t>& community,
                        std::size_t num_communities, double m2, double resolution) {
  std::vector<double> internal(num_communities, 0.0);
  std::vector<double> total(num_communities, 0.0);
  for (std::size_t v = 0; v < lg.size(); ++v) {
    const std::uint32_t c = community[v];
    internal[c] += lg.loops[v];
    total[c] += lg.degree[v];
    for (std::size_t i = lg.offsets[v]; i < lg.offsets[v + 1]; ++i) {
      if (community[lg.targets[i]] == c) internal[c] += lg.weights[i];
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < num_communities; ++c) {
    q += internal[c] / m2 - resolution * (total[c] / m2) * (total[c] / m2);
  }
  return q;
}

// Local-moving phase. Returns true if any node changed community.
bool local_moves(const LevelGraph& lg, std::vector<std::uint32_t>& community, double m2,
                 const ModularityParams& params, Rng& rng) {
  const std::size_t n = lg.size();
  std::vector<double> total(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) total[community[v]] += lg.degree[v];
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  shuffle_in_place(order, rng);

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  double q = level_modularity(lg, community, n, m2, params.resolution);

  while (true) {
    std::size_t moves = 0;
    for (std::uint32_t v : order) {
      const std::uint32_t own = community[v];
      const double k = lg.degree[v];
      touched.clear();
      for (std::size_t i = lg.offsets[v]; i < lg.offsets[v + 1]; ++i) {
        const std::uint32_t c = community[lg.targets[i]];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += lg.weights[i];
      }
      total[own] -= k;
      const double scale = params.resolution * k / m2;
      double best_gain = link[own] - total[own] * scale;
      std::uint32_t best = own;
      for (std::uint32_t c : touched) {
        if (c == own) continue;
        const double gain = link[c] - total[c] * scale;
        if (gain > best_gain || (gain == best_gain && best != own && c < best)) {
          best_gain = gain;
          best = c;
        }
      }
      for (std::uint32_t c : touched) link[c] = 0.0;
      link[own] = 0.0;
      total[best] += k;
      if (best != own) {
        community[v] = best;
        ++moves;
      }
    }
    if (moves == 0) break;
    any_move = true;
    const double next_q = level_modularity(lg, community, n, m2, params.resolution);
    const double gain = next_q - q;
    q = next_q;
    if (gain < params.min_gain) break;
  }
  return any_move;
}

// Renumbers communities densely by first member and builds the quotient graph.
LevelGraph aggregate(const LevelGraph& lg, std::vector<std::uint32_t>& community,
                     std::size_t& num_communities) {
  const std::size_t n = lg.size();
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> renumber(n, kUnset);
  std::uint32_t next = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (renumber[community[v]] == kUnset) renumber[community[v]] = next++;
    community[v] = renumber[community[v]];
  }
  num_communities = next;

  std::vector<std::size_t> start(next + 1, 0);
  for (std::size_t v = 0; v < n; ++v) ++start[community[v] + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::uint32_t> members(n);
  {
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t v = 0; v < n; ++v) members[cursor[community[v]]++] = static_cast<std::uint32_t>(v);
  }

  LevelGraph out;
  out.offsets.assign(next + 1, 0);
  out.loops.assign(next, 0.0);
  out.degree.assign(next, 0.0);
  std::vector<double> acc(next, 0.0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t c = 0; c < next; ++c) {
    touched.clear();
    for (std::size_t idx = start[c]; idx < start[c + 1]; ++idx) {
      const std::uint32_t v = members[idx];
      out.loops[c] += lg.loops[v];
      out.degree[c] += lg.degree[v];
      for (std::size_t i = lg.offsets[v]; i < lg.offsets[v + 1]; ++i) {
        const std::uint32_t d = community[lg.targets[i]];
        if (d == c) {
          out.loops[c] += lg.weights[i];
        } else {
          if (acc[d] == 0.0) touched.push_back(d);
          acc[d] += lg.weights[i];
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::uint32_t d : touched) {
      // Zero-weight links vanish here, which cannot change any gain.
      out.targets.push_back(d);
      out.weights.push_back(acc[d]);
      acc[d] = 0.0;
    }
    out.offsets[c + 1] = out.targets.size();
  }
  return out;
}

}  // namespace

Clustering louvain(const SocialGraph& g, const ModularityParams& params) {
  const std::size_t n = g.num_nodes();
  const double m2 = 2.0 * g.total_weight();
  if (!(m2 > 0.0)) {
    Clustering c = singleton_clustering(n);
    return c;
  }

  std::vector<std::uint32_t> node_to_community(n);
  std::iota(node_to_community.begin(), node_to_community.end(), 0u);
  LevelGraph level = level_from(g);
  std::vector<double> trace;
  double q = level_modularity(level, node_to_community, n, m2, params.resolution);

  const LevelGraph base = level;
  std::size_t pass = 0;
  while (pass < params.max_passes) {
    for (; pass < params.max_passes; ++pass) {
      Rng rng(derive_seed(params.seed, pass));
      std::vector<std::uint32_t> community(level.size());
      std::iota(community.begin(), community.end(), 0u);
      if (!local_moves(level, community, m2, params, rng)) break;
      std::size_t count = 0;
      level = aggregate(level, community, count);
      for (auto& c : node_to_community) c = community[c];
      std::vector<std::uint32_t> identity(count);
      std::iota(identity.begin(), identity.end(), 0u);
      const double next_q = level_modularity(level, identity, count, m2, params.resolution);
      trace.push_back(next_q);
      const double gain = next_q - q;
      q = next_q;
      if (gain < params.min_gain) {
        ++pass;
        break;
      }
    }
    if (pass >= params.max_passes || level.size() == n) break;
    // Node-level moves from the final partition; when they help, aggregate
    // again and resume the passes.
    Rng rng(derive_seed(params.seed, pass));
    std::vector<std::uint32_t> refined = node_to_community;
    if (!local_moves(base, refined, m2, params, rng)) break;
    const double refined_q = level_modularity(base, refined, n, m2, params.resolution);
    if (refined_q - q < params.min_gain) break;
    node_to_community = std::move(refined);
    std::size_t count = 0;
    level = aggregate(base, node_to_community, count);
    q = refined_q;
    trace.push_back(q);
    ++pass;
  }

  std::vector<std::uint64_t> labels(node_to_community.begin(), node_to_community.end());
  Clustering c = make_clustering(labels);
  c.modularity = modularity(g, c.assignment, params.resolution);
  c.modularity_trace = std::move(trace);
  return c;
}

}  // namespace linklouvain
