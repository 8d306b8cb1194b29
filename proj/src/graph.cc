#include "linklouvain/graph.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace linklouvain {

SocialGraph SocialGraph::from_edges(std::size_t num_nodes,
                                    std::vector<WeightedEdge> edges,
                                    std::vector<ExternalId> external_ids) {
  if (!external_ids.empty() && external_ids.size() != num_nodes) {
    throw std::invalid_argument("external id table size does not match node count");
  }
  if (num_nodes > std::numeric_limits<NodeId>::max()) {
    throw std::invalid_argument("node count exceeds 32-bit id space");
  }
  SocialGraph g;
  g.external_ids_ = std::move(external_ids);

  std::vector<std::size_t> counts(num_nodes + 1, 0);
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw std::invalid_argument("edge weight must be finite and nonnegative");
    }
    if (e.u == e.v) continue;
    ++counts[e.u + 1];
    ++counts[e.v + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());

  std::vector<NodeId> raw_targets(counts.back());
  std::vector<double> raw_weights(counts.back());
  {
    std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
    for (const auto& e : edges) {
      if (e.u == e.v) continue;
      raw_targets[cursor[e.u]] = e.v;
      raw_weights[cursor[e.u]++] = e.weight;
      raw_targets[cursor[e.v]] = e.u;
      raw_weights[cursor[e.v]++] = e.weight;
    }
  }
  edges.clear();
  edges.shrink_to_fit();

  // Sort each row and collapse duplicates (max weight).
  g.offsets_.assign(num_nodes + 1, 0);
  std::vector<std::pair<NodeId, double>> row;
  std::size_t out = 0;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    row.clear();
    for (std::size_t i = counts[v]; i < counts[v + 1]; ++i) {
      row.emplace_back(raw_targets[i], raw_weights[i]);
    }
    std::sort(row.begin(), row.end());
    g.offsets_[v] = out;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i + 1 < row.size() && row[i + 1].first == row[i].first) continue;
      // Sorted by (target, weight): the last duplicate carries the max.
      raw_targets[out] = row[i].first;
      raw_weights[out] = row[i].second;
      ++out;
    }
  }
  g.offsets_[num_nodes] = out;
  raw_targets.resize(out);
  raw_weights.resize(out);
  raw_targets.shrink_to_fit();
  raw_weights.shrink_to_fit();
  g.targets_ = std::move(raw_targets);
  g.weights_ = std::move(raw_weights);

  // Both directions of a pair see the same weight multiset, so the collapse
  // above stays symmetric.
  g.upper_offsets_.assign(num_nodes + 1, 0);
  g.upper_begin_.assign(num_nodes, 0);
  double total = 0.0;
  for (NodeId v = 0; v < num_nodes; ++v) {
    const auto nbrs = g.neighbors(v);
    const auto first_upper =
        std::upper_bound(nbrs.begin(), nbrs.end(), v) - nbrs.begin();
    g.upper_begin_[v] = static_cast<std::uint32_t>(first_upper);
    g.upper_offsets_[v + 1] = g.upper_offsets_[v] + (nbrs.size() - first_upper);
    const auto w = g.weights(v);
    for (std::size_t i = first_upper; i < nbrs.size(); ++i) total += w[i];
  }
  g.total_weight_ = total;
  return g;
}

double SocialGraph::weighted_degree(NodeId v) const {
  double sum = 0.0;
  for (double w : weights(v)) sum += w;
  return sum;
}

std::size_t SocialGraph::max_degree() const {
  std::size_t best = 0;
  for (NodeId v = 0; v < num_nodes(); ++v) best = std::max(best, degree(v));
  return best;
}

bool SocialGraph::has_edge(NodeId u, NodeId v) const {
  if (u >= num_nodes() || v >= num_nodes()) return false;
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

double SocialGraph::edge_weight(NodeId u, NodeId v) const {
  if (u >= num_nodes() || v >= num_nodes()) return -1.0;
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return -1.0;
  return weights(u)[it - nbrs.begin()];
}

NodeId SocialGraph::dense_id(ExternalId id) const {
  if (external_ids_.empty()) {
    if (id < 0 || static_cast<std::size_t>(id) >= num_nodes()) {
      throw std::out_of_range("unknown node id " + std::to_string(id));
    }
    return static_cast<NodeId>(id);
  }
  // External ids are assigned in ascending order by the loaders, but graphs
  // built from arbitrary tables may not be sorted.
  if (std::is_sorted(external_ids_.begin(), external_ids_.end())) {
    const auto it = std::lower_bound(external_ids_.begin(), external_ids_.end(), id);
    if (it != external_ids_.end() && *it == id) {
      return static_cast<NodeId>(it - external_ids_.begin());
    }
  } else {
    const auto it = std::find(external_ids_.begin(), external_ids_.end(), id);
    if (it != external_ids_.end()) return static_cast<NodeId>(it - external_ids_.begin());
  }
  throw std::out_of_range("unknown node id " + std::to_string(id));
}

SocialGraph SocialGraph::with_features(FeatureMatrix features) const {
  if (features.dim > 0 && features.rows != num_nodes()) {
    throw std::invalid_argument("feature rows (" + std::to_string(features.rows) +
                                ") do not match node count (" +
                                std::to_string(num_nodes()) + ")");
  }
  if (features.values.size() != features.rows * features.dim) {
    throw std::invalid_argument("feature matrix storage size mismatch");
  }
  SocialGraph g = *this;
  g.features_ = std::move(features);
  return g;
}

std::vector<WeightedEdge> SocialGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(num_edges());
  for_each_edge([&](NodeId u, NodeId v, double w) { out.push_back({u, v, w}); });
  return out;
}

bool operator==(const SocialGraph& a, const SocialGraph& b) {
  if (a.num_nodes() != b.num_nodes()) return false;
  for (NodeId v = 0; v < a.num_nodes(); ++v) {
    if (a.external_id(v) != b.external_id(v)) return false;
  }
  return a.offsets_ == b.offsets_ && a.targets_ == b.targets_ &&
         a.weights_ == b.weights_ && a.features_.dim == b.features_.dim &&
         a.features_.values == b.features_.values;
}

SocialGraph induced_subgraph(const SocialGraph& g, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const std::size_t n = g.num_nodes();
  constexpr NodeId kAbsent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> local(n, kAbsent);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= n) {
      throw std::out_of_range("unknown node id " + std::to_string(nodes[i]));
    }
    local[nodes[i]] = static_cast<NodeId>(i);
  }
  std::vector<WeightedEdge> edges;
  std::vector<ExternalId> ids(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId v = nodes[i];
    ids[i] = g.external_id(v);
    const auto nbrs = g.neighbors(v);
    const auto w = g.weights(v);
    for (std::size_t k = g.upper_begin(v); k < nbrs.size(); ++k) {
      if (local[nbrs[k]] != kAbsent) {
        edges.push_back({static_cast<NodeId>(i), local[nbrs[k]], w[k]});
      }
    }
  }
  SocialGraph sub = SocialGraph::from_edges(nodes.size(), std::move(edges), std::move(ids));
  if (g.has_features()) {
    FeatureMatrix f{nodes.size(), g.feature_dim(), {}};
    f.values.reserve(nodes.size() * g.feature_dim());
    for (NodeId v : nodes) {
      const auto row = g.features(v);
      f.values.insert(f.values.end(), row.begin(), row.end());
    }
    sub = sub.with_features(std::move(f));
  }
  return sub;
}

LabelGraph::LabelGraph(std::size_t num_nodes, int horizon, std::vector<LabelEdge> edges)
    : num_nodes_(num_nodes), horizon_(horizon) {
  if (horizon < 0) throw std::invalid_argument("label graph horizon must be >= 0");
  for (auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw std::invalid_argument("label edge endpoint not in social graph");
    }
    if (e.u == e.v) throw std::invalid_argument("label edge is a self-loop");
    if (e.day < 0 || e.day > horizon) {
      throw std::invalid_argument("label edge day " + std::to_string(e.day) +
                                  " outside [0, " + std::to_string(horizon) + "]");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(), [](const LabelEdge& a, const LabelEdge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.day < b.day;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const LabelEdge& a, const LabelEdge& b) {
                            return a.u == b.u && a.v == b.v;
                          }),
              edges.end());
  edges_ = std::move(edges);
}

LabelGraph LabelGraph::snapshot(int t) const {
  LabelGraph out;
  out.num_nodes_ = num_nodes_;
  out.horizon_ = horizon_;
  for (const auto& e : edges_) {
    if (e.day <= t) out.edges_.push_back(e);
  }
  return out;
}

std::size_t LabelGraph::count_through(int t) const {
  return static_cast<std::size_t>(std::count_if(
      edges_.begin(), edges_.end(), [t](const LabelEdge& e) { return e.day <= t; }));
}

}  // namespace linklouvain
