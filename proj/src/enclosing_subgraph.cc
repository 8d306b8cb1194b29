#include "linklouvain/enclosing_subgraph.h"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "linklouvain/random.h"

namespace linklouvain {

NeighborView::NeighborView(const SocialGraph& g, std::size_t fanout, std::uint64_t seed)
    : graph_(&g), fanout_(fanout) {
  if (fanout == 0 || g.max_degree() <= fanout) return;
  aliased_ = false;
  const std::size_t n = g.num_nodes();
  offsets_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + std::min(g.degree(v), fanout);
  targets_.resize(offsets_[n]);
  std::vector<std::pair<std::uint64_t, NodeId>> ranked;
  for (NodeId v = 0; v < n; ++v) {
    const auto nbrs = g.neighbors(v);
    NodeId* dst = targets_.data() + offsets_[v];
    if (nbrs.size() <= fanout) {
      std::copy(nbrs.begin(), nbrs.end(), dst);
      continue;
    }
    ranked.clear();
    for (NodeId u : nbrs) ranked.emplace_back(hash_combine(seed, v, u), u);
    std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(fanout),
                     ranked.end());
    for (std::size_t i = 0; i < fanout; ++i) dst[i] = ranked[i].second;
    std::sort(dst, dst + fanout);
  }
}

SubgraphExtractor::SubgraphExtractor(const NeighborView& view)
    : view_(&view), marks_(view.num_nodes()) {}

void SubgraphExtractor::reset_marks() {
  std::fill(marks_.begin(), marks_.end(), Mark{});
  epoch_ = 0;
  epoch_a_ = 0;
  last_hops_ = -1;
}

template <bool kSideA>
void SubgraphExtractor::bfs(NodeId source, int hops, std::uint32_t epoch,
                            std::vector<NodeId>& reached) {
  auto stamp = [](Mark& m) -> std::uint32_t& { return kSideA ? m.stamp_a : m.stamp_b; };
  auto dist = [](Mark& m) -> std::uint8_t& { return kSideA ? m.dist_a : m.dist_b; };
  reached.clear();
  frontier_.clear();
  stamp(marks_[source]) = epoch;
  dist(marks_[source]) = 0;
  reached.push_back(source);
  frontier_.push_back(source);
  for (int d = 1; d <= hops && !frontier_.empty(); ++d) {
    next_.clear();
    for (NodeId v : frontier_) {
      for (NodeId u : view_->out(v)) {
        Mark& m = marks_[u];
        if (stamp(m) == epoch) continue;
        stamp(m) = epoch;
        dist(m) = static_cast<std::uint8_t>(d);
        reached.push_back(u);
        next_.push_back(u);
      }
    }
    frontier_.swap(next_);
  }
}

void SubgraphExtractor::extract(NodeId a, NodeId b, int hops, std::size_t max_nodes,
                                std::uint64_t seed, EnclosingSubgraph& out, bool full_adjacency) {
  const std::size_t n = view_->num_nodes();
  if (a >= n || b >= n) throw std::invalid_argument("enclosing subgraph: node id out of range");
  if (a == b) throw std::invalid_argument("enclosing subgraph: targets must differ");
  if (hops < 0 || hops > 250) throw std::invalid_argument("enclosing subgraph: hops out of range");
  if (max_nodes < 2) throw std::invalid_argument("enclosing subgraph: max_nodes must be >= 2");

  if (epoch_ == std::numeric_limits<std::uint32_t>::max() ||
      epoch_a_ == std::numeric_limits<std::uint32_t>::max()) {
    reset_marks();
  }
  ++epoch_;
  if (a != last_a_ || hops != last_hops_ || epoch_a_ == 0) {
    ++epoch_a_;
    bfs<true>(a, hops, epoch_a_, reached_a_);
    last_a_ = a;
    last_hops_ = hops;
  }
  bfs<false>(b, hops, epoch_, reached_b_);

  others_.clear();
  for (NodeId v : reached_a_) {
    if (v != a && v != b) others_.push_back(v);
  }
  for (NodeId v : reached_b_) {
    if (v != a && v != b && marks_[v].stamp_a != epoch_a_) others_.push_back(v);
  }
  out.truncated = others_.size() + 2 > max_nodes;
  if (out.truncated) {
    Rng rng(hash_combine(seed, a, b));
    const std::size_t keep = max_nodes - 2;
    for (std::size_t i = 0; i < keep; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, others_.size() - 1);
      std::swap(others_[i], others_[pick(rng)]);
    }
    others_.resize(keep);
  }
  std::sort(others_.begin(), others_.end());

  const auto capped = static_cast<std::uint8_t>(hops + 1);
  out.hops = hops;
  out.full_adjacency = full_adjacency || out.truncated;
  out.nodes.clear();
  out.nodes.push_back(a);
  out.nodes.push_back(b);
  out.nodes.insert(out.nodes.end(), others_.begin(), others_.end());
  const std::size_t size = out.nodes.size();
  out.dist_a.resize(size);
  out.dist_b.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    Mark& m = marks_[out.nodes[i]];
    m.stamp_local = epoch_;
    m.local_index = static_cast<std::uint32_t>(i);
    out.dist_a[i] = m.stamp_a == epoch_a_ ? m.dist_a : capped;
    out.dist_b[i] = m.stamp_b == epoch_ ? m.dist_b : capped;
  }

  out.offsets.resize(size + 1);
  out.adjacency.clear();
  out.offsets[0] = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const bool wanted =
        out.full_adjacency || std::min(out.dist_a[i], out.dist_b[i]) + 1 <= hops;
    if (wanted) {
      for (NodeId u : view_->out(out.nodes[i])) {
        const Mark& m = marks_[u];
        if (m.stamp_local == epoch_) out.adjacency.push_back(m.local_index);
      }
    }
    out.offsets[i + 1] = static_cast<std::uint32_t>(out.adjacency.size());
  }
}

EnclosingSubgraph extract_enclosing_subgraph(const NeighborView& view, NodeId a, NodeId b,
                                             int hops, std::size_t max_nodes,
                                             std::uint64_t seed) {
  SubgraphExtractor ex(view);
  EnclosingSubgraph sg;
  ex.extract(a, b, hops, max_nodes, seed, sg);
  return sg;
}

EnclosingSubgraph extract_enclosing_subgraph(const SocialGraph& g, NodeId a, NodeId b, int hops,
                                             std::size_t max_nodes, std::uint64_t seed) {
  const NeighborView view(g, 0, 0);
  return extract_enclosing_subgraph(view, a, b, hops, max_nodes, seed);
}

std::size_t node_label_index(int d_a, int d_b, int hops) {
  if (hops < 0 || d_a < 0 || d_b < 0 || d_a > hops + 1 || d_b > hops + 1) {
    throw std::out_of_range("node label: distance (" + std::to_string(d_a) + ", " +
                            std::to_string(d_b) + ") outside [0, " + std::to_string(hops + 1) +
                            "]");
  }
  return static_cast<std::size_t>(d_a) * static_cast<std::size_t>(hops + 2) +
         static_cast<std::size_t>(d_b);
}

std::vector<double> node_label(int d_a, int d_b, int hops) {
  const std::size_t index = node_label_index(d_a, d_b, hops);
  std::vector<double> v(static_cast<std::size_t>(hops + 2) * static_cast<std::size_t>(hops + 2),
                        0.0);
  v[index] = 1.0;
  return v;
}

}  // namespace linklouvain
