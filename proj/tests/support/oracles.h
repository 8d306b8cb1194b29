#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// They favor obviously-correct loops over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "linklouvain/graph.h"

namespace linklouvain::oracle {

// Q straight from the double sum over node pairs.
inline double modularity(const SocialGraph& g, const std::vector<std::uint32_t>& c,
                         double resolution = 1.0) {
  const std::size_t n = g.num_nodes();
  std::vector<double> k(n, 0.0);
  double m2 = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    for (double w : g.weights(v)) k[v] += w;
    m2 += k[v];
  }
  double q = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (c[i] != c[j]) continue;
      const double a = g.has_edge(i, j) ? g.edge_weight(i, j) : 0.0;
      q += a - resolution * k[i] * k[j] / m2;
    }
  }
  return q / m2;
}

// Best Q over all set partitions, enumerated as restricted growth strings.
inline double best_modularity(const SocialGraph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> rgs(n, 0);
  double best = -1.0;
  while (true) {
    best = std::max(best, modularity(g, rgs));
    // Next restricted growth string.
    bool advanced = false;
    for (std::size_t i = n - 1; i >= 1 && !advanced; --i) {
      const std::uint32_t max_prefix = *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[i] <= max_prefix) {
        ++rgs[i];
        std::fill(rgs.begin() + i + 1, rgs.end(), 0);
        advanced = true;
      }
    }
    if (!advanced) break;
  }
  return best;
}

inline bool connected(const SocialGraph& g) {
  if (g.num_nodes() == 0) return true;
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<NodeId> stack = {0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u : g.neighbors(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == g.num_nodes();
}

// Fixed set of connected graphs with 2..8 nodes: paths, cycles, stars,
// cliques, barbells and seeded random graphs.
inline std::vector<SocialGraph> small_connected_graphs() {
  std::vector<SocialGraph> out;
  auto add = [&](std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    std::vector<WeightedEdge> e;
    for (auto [u, v] : edges) e.push_back({u, v, 1.0});
    SocialGraph g = SocialGraph::from_edges(n, e);
    if (g.num_edges() > 0 && connected(g)) out.push_back(std::move(g));
  };
  for (std::size_t n = 2; n <= 8; ++n) {
    std::vector<std::pair<NodeId, NodeId>> path, cycle, star, clique;
    for (NodeId i = 0; i + 1 < n; ++i) path.push_back({i, i + 1});
    cycle = path;
    if (n > 2) cycle.push_back({static_cast<NodeId>(n - 1), 0});
    for (NodeId i = 1; i < n; ++i) star.push_back({0, i});
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) clique.push_back({i, j});
    }
    add(n, path);
    add(n, cycle);
    add(n, star);
    add(n, clique);
  }
  for (std::size_t half : {3u, 4u}) {
    std::vector<std::pair<NodeId, NodeId>> barbell;
    for (NodeId b : {NodeId{0}, static_cast<NodeId>(half)}) {
      for (NodeId i = 0; i < half; ++i) {
        for (NodeId j = i + 1; j < half; ++j) barbell.push_back({b + i, b + j});
      }
    }
    barbell.push_back({0, static_cast<NodeId>(half)});
    add(2 * half, barbell);
  }
  std::mt19937_64 rng(2024);
  while (out.size() < 80) {
    const std::size_t n = 4 + rng() % 5;
    const double p = 0.25 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng);
    std::vector<std::pair<NodeId, NodeId>> e;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (std::uniform_real_distribution<double>(0, 1)(rng) < p) e.push_back({i, j});
      }
    }
    add(n, e);
  }
  return out;
}

// Adjusted Rand index between two labelings.
inline double adjusted_rand_index(const std::vector<std::uint32_t>& a,
                                  const std::vector<std::uint32_t>& b) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
  std::map<std::uint32_t, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ra[a[i]] += 1;
    rb[b[i]] += 1;
  }
  auto c2 = [](double x) { return x * (x - 1) / 2; };
  double sum_joint = 0, sum_a = 0, sum_b = 0;
  for (const auto& [k, v] : joint) sum_joint += c2(v);
  for (const auto& [k, v] : ra) sum_a += c2(v);
  for (const auto& [k, v] : rb) sum_b += c2(v);
  const double expected = sum_a * sum_b / c2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_joint - expected) / (max_index - expected);
}

// Cluster bootstrap of Var(sum S / sum N).
inline double bootstrap_ratio_variance(const std::vector<double>& s, const std::vector<double>& n,
                                       std::size_t resamples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
  std::vector<double> ratios;
  ratios.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    double ss = 0, nn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::size_t j = pick(rng);
      ss += s[j];
      nn += n[j];
    }
    ratios.push_back(ss / nn);
  }
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / double(resamples);
  double var = 0;
  for (double x : ratios) var += (x - mean) * (x - mean);
  return var / double(resamples - 1);
}

}  // namespace linklouvain::oracle
