#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "linklouvain/graph.h"

namespace linklouvain {

// Per-node neighbor lists capped at `fanout`. A node with more neighbors keeps
// the `fanout` whose seeded hash rank is smallest; the choice depends only on
// (seed, node, neighbor), never on traversal order. Kept lists stay sorted by
// node id. fanout == 0 means no cap, in which case the view aliases the graph.
class NeighborView {
 public:
  NeighborView(const SocialGraph& g, std::size_t fanout, std::uint64_t seed);

  std::span<const NodeId> out(NodeId v) const {
    if (aliased_) return graph_->neighbors(v);
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t num_nodes() const { return graph_->num_nodes(); }
  const SocialGraph& graph() const { return *graph_; }
  std::size_t fanout() const { return fanout_; }
  // True when no neighbor list was truncated.
  bool exact() const { return aliased_; }

 private:
  const SocialGraph* graph_;
  std::size_t fanout_;
  bool aliased_ = true;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

// Union of the K-hop balls around two target nodes.
//
// Local node 0 is target A and local node 1 is target B; the remaining local
// nodes follow ascending global id. dist_a / dist_b hold hop distances capped
// at K + 1, measured before any truncation. neighbors(v) lists the local ids of
// v's (view) neighbors that survived; it excludes v itself.
struct EnclosingSubgraph {
  int hops = 0;
  std::vector<NodeId> nodes;
  std::vector<std::uint8_t> dist_a;
  std::vector<std::uint8_t> dist_b;
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> adjacency;
  bool truncated = false;
  // When false, only nodes within K - 1 hops of a target carry adjacency
  // lists (all that a K-layer forward pass reads).
  bool full_adjacency = true;

  std::size_t size() const { return nodes.size(); }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {adjacency.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

// Reusable scratch space; one per thread.
class SubgraphExtractor {
 public:
  explicit SubgraphExtractor(const NeighborView& view);

  // Fills `out` with the enclosing subgraph of (a, b). When the union exceeds
  // max_nodes, the targets are kept and max_nodes - 2 other nodes are sampled
  // uniformly with a seed derived from (seed, a, b). Throws
  // std::invalid_argument when a == b, an id is out of range, hops < 0, or
  // max_nodes < 2.
  void extract(NodeId a, NodeId b, int hops, std::size_t max_nodes, std::uint64_t seed,
               EnclosingSubgraph& out, bool full_adjacency = true);

 private:
  // Per-node scratch, packed so one visit touches one cache line.
  struct Mark {
    std::uint32_t stamp_a = 0;
    std::uint32_t stamp_b = 0;
    std::uint32_t stamp_local = 0;
    std::uint32_t local_index = 0;
    std::uint8_t dist_a = 0;
    std::uint8_t dist_b = 0;
  };

  template <bool kSideA>
  void bfs(NodeId source, int hops, std::uint32_t epoch, std::vector<NodeId>& reached);
  void reset_marks();

  const NeighborView* view_;
  // The BFS from `a` is reused while consecutive calls share a and hops.
  std::uint32_t epoch_ = 0;
  std::uint32_t epoch_a_ = 0;
  NodeId last_a_ = 0;
  int last_hops_ = -1;
  std::vector<Mark> marks_;
  std::vector<NodeId> reached_a_, reached_b_, frontier_, next_, others_;
};

EnclosingSubgraph extract_enclosing_subgraph(const SocialGraph& g, NodeId a, NodeId b, int hops,
                                             std::size_t max_nodes = 512,
                                             std::uint64_t seed = 0);
EnclosingSubgraph extract_enclosing_subgraph(const NeighborView& view, NodeId a, NodeId b,
                                             int hops, std::size_t max_nodes = 512,
                                             std::uint64_t seed = 0);

// One-hot index of the (d_a, d_b) role: d_a * (K + 2) + d_b. Throws
// std::out_of_range when a distance exceeds K + 1.
std::size_t node_label_index(int d_a, int d_b, int hops);
// Full one-hot vector of length (K + 2)^2.
std::vector<double> node_label(int d_a, int d_b, int hops);

}  // namespace linklouvain
