#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace linklouvain {

using NodeId = std::uint32_t;
using ExternalId = std::int64_t;

struct WeightedEdge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

// Row-major n x d node feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
};

// Immutable weighted undirected graph in CSR form.
//
// Invariants: neighbor lists are sorted ascending, symmetric with equal
// weights, and contain no self-loops or duplicates; weights are finite and
// nonnegative. Node ids are dense in [0, num_nodes()); external_id() maps
// back to the identifiers used in input files.
class SocialGraph {
 public:
  SocialGraph() = default;

  // Canonicalizes an arbitrary edge bag: drops self-loops, symmetrizes and
  // collapses duplicates keeping the max weight. Throws std::invalid_argument
  // on out-of-range endpoints or negative/non-finite weights.
  static SocialGraph from_edges(std::size_t num_nodes,
                                std::vector<WeightedEdge> edges,
                                std::vector<ExternalId> external_ids = {});

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return targets_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(NodeId v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  double weighted_degree(NodeId v) const;
  // Sum of undirected edge weights (m in the modularity formula).
  double total_weight() const { return total_weight_; }
  std::size_t max_degree() const;

  bool has_edge(NodeId u, NodeId v) const;
  // Weight of (u, v), or a negative value when the edge is absent.
  double edge_weight(NodeId u, NodeId v) const;

  ExternalId external_id(NodeId v) const {
    return external_ids_.empty() ? static_cast<ExternalId>(v) : external_ids_[v];
  }
  const std::vector<ExternalId>& external_ids() const { return external_ids_; }
  // Dense id of an external id; throws std::out_of_range when unknown.
  NodeId dense_id(ExternalId id) const;

  bool has_features() const { return features_.dim > 0; }
  std::size_t feature_dim() const { return features_.dim; }
  std::span<const double> features(NodeId v) const { return features_.row(v); }
  const FeatureMatrix& feature_matrix() const { return features_; }
  // Copy of this graph carrying the given features (rows must equal n).
  SocialGraph with_features(FeatureMatrix features) const;

  // Canonical undirected edge list (u < v), ordered by (u, v).
  std::vector<WeightedEdge> edges() const;

  // Calls f(u, v, weight) once per undirected edge with u < v, in canonical
  // order. The position of an edge in this order is its edge index.
  template <typename F>
  void for_each_edge(F&& f) const {
    const std::size_t n = num_nodes();
    for (NodeId u = 0; u < n; ++u) {
      const auto nbrs = neighbors(u);
      const auto w = weights(u);
      for (std::size_t i = upper_begin_[u]; i < nbrs.size(); ++i) {
        f(u, nbrs[i], w[i]);
      }
    }
  }

  // Offset of u's first upper-triangle edge in canonical order; together with
  // upper_begin() this gives O(1) edge indices for parallel loops.
  const std::vector<std::size_t>& upper_offsets() const { return upper_offsets_; }
  // Index into neighbors(u) of the first neighbor greater than u.
  std::size_t upper_begin(NodeId u) const { return upper_begin_[u]; }

  // Structural equality including weights and external ids.
  friend bool operator==(const SocialGraph& a, const SocialGraph& b);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<double> weights_;
  std::vector<std::size_t> upper_offsets_;
  std::vector<std::uint32_t> upper_begin_;
  std::vector<ExternalId> external_ids_;
  FeatureMatrix features_;
  double total_weight_ = 0.0;
};

// Induced subgraph on `nodes` (deduplicated and sorted ascending). External
// ids and features carry over. Throws std::out_of_range on unknown ids.
SocialGraph induced_subgraph(const SocialGraph& g, std::vector<NodeId> nodes);

struct LabelEdge {
  NodeId u = 0;
  NodeId v = 0;
  int day = 0;
};

// Time-stamped campaign graph over the node set of a companion SocialGraph.
// Edges are undirected and stored canonically (u < v); a pair recorded more
// than once keeps its earliest day.
class LabelGraph {
 public:
  LabelGraph() = default;
  // Throws std::invalid_argument on endpoints >= num_nodes, self-loops, or
  // days outside [0, horizon].
  LabelGraph(std::size_t num_nodes, int horizon, std::vector<LabelEdge> edges);

  std::size_t num_nodes() const { return num_nodes_; }
  int horizon() const { return horizon_; }
  const std::vector<LabelEdge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  // Edges with day <= t.
  LabelGraph snapshot(int t) const;
  std::size_t count_through(int t) const;

 private:
  std::size_t num_nodes_ = 0;
  int horizon_ = 0;
  std::vector<LabelEdge> edges_;
};

}  // namespace linklouvain
