#include <algorithm>
#include <random>
#include <set>

#include "linklouvain/generate.h"
#include "linklouvain/graph.h"
#include "test_util.h"

namespace linklouvain {
namespace {

using testing::graph_of;

void expect_canonical(const SocialGraph& g) {
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto nb = g.neighbors(v);
    const auto w = g.weights(v);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
    for (std::size_t i = 0; i < nb.size(); ++i) {
      EXPECT_NE(nb[i], v);
      EXPECT_TRUE(std::isfinite(w[i]) && w[i] >= 0.0);
      EXPECT_EQ(g.edge_weight(nb[i], v), w[i]);
    }
  }
}

TEST(SocialGraph, SymmetricPairCollapses) {
  const SocialGraph g = SocialGraph::from_edges(3, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}});
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(2), 1u);
  expect_canonical(g);
}

TEST(SocialGraph, DuplicatesKeepMaxWeightAndSelfLoopsDrop) {
  const SocialGraph g =
      SocialGraph::from_edges(3, {{0, 1, 0.5}, {1, 0, 2.0}, {0, 1, 1.0}, {2, 2, 1.0}});
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_DOUBLE_EQ(g.edge_weight(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(g.total_weight(), 2.0);
  EXPECT_LT(g.edge_weight(0, 2), 0.0);
  EXPECT_EQ(g.degree(2), 0u);
}

TEST(SocialGraph, RejectsBadEdges) {
  EXPECT_THROW(SocialGraph::from_edges(2, {{0, 2, 1.0}}), std::invalid_argument);
  EXPECT_THROW(SocialGraph::from_edges(2, {{0, 1, -1.0}}), std::invalid_argument);
  EXPECT_THROW(SocialGraph::from_edges(2, {{0, 1, std::nan("")}}), std::invalid_argument);
}

TEST(SocialGraph, EmptyGraph) {
  const SocialGraph g = SocialGraph::from_edges(0, {});
  EXPECT_EQ(g.num_nodes(), 0u);
  EXPECT_EQ(g.num_edges(), 0u);
  EXPECT_EQ(g.max_degree(), 0u);
}

TEST(SocialGraph, RandomEdgeBagsAreCanonical) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<WeightedEdge> bag;
    std::set<std::pair<NodeId, NodeId>> distinct;
    for (int i = 0; i < 150; ++i) {
      const NodeId u = rng() % n, v = rng() % n;
      bag.push_back({u, v, static_cast<double>(rng() % 5)});
      if (u != v) distinct.insert({std::min(u, v), std::max(u, v)});
    }
    const SocialGraph g = SocialGraph::from_edges(n, bag);
    expect_canonical(g);
    EXPECT_EQ(g.num_edges(), distinct.size());
    for (const auto& e : g.edges()) {
      EXPECT_LT(e.u, e.v);
      EXPECT_TRUE(distinct.count({e.u, e.v}));
    }
  }
}

TEST(SocialGraph, ForEachEdgeMatchesEdgesAndUpperOffsets) {
  GraphGenSpec spec;
  spec.n = 300;
  spec.m = 3;
  spec.seed = 3;
  const SocialGraph g = generate_graph(spec).graph;
  const auto list = g.edges();
  std::size_t i = 0;
  g.for_each_edge([&](NodeId u, NodeId v, double w) {
    ASSERT_LT(i, list.size());
    EXPECT_EQ(list[i].u, u);
    EXPECT_EQ(list[i].v, v);
    EXPECT_EQ(list[i].weight, w);
    ++i;
  });
  EXPECT_EQ(i, g.num_edges());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.upper_begin(u) < g.degree(u)) { EXPECT_EQ(list[g.upper_offsets()[u]].u, u); }
  }
}

TEST(SocialGraph, ExternalIds) {
  const SocialGraph g = SocialGraph::from_edges(3, {{0, 1, 1.0}}, {10, 20, 35});
  EXPECT_EQ(g.external_id(2), 35);
  EXPECT_EQ(g.dense_id(20), 1u);
  EXPECT_THROW(g.dense_id(99), std::out_of_range);
}

TEST(InducedSubgraph, TriangleKeepTwo) {
  const SocialGraph t = graph_of(3, {{0, 1}, {1, 2}, {0, 2}});
  const SocialGraph s = induced_subgraph(t, {2, 0});
  EXPECT_EQ(s.num_nodes(), 2u);
  EXPECT_EQ(s.num_edges(), 1u);
  EXPECT_EQ(s.external_id(0), 0);
  EXPECT_EQ(s.external_id(1), 2);
}

TEST(InducedSubgraph, KeepAllIsIdentity) {
  GraphGenSpec spec;
  spec.n = 200;
  spec.m = 3;
  spec.seed = 4;
  const SocialGraph g = generate_graph(spec).graph;
  std::vector<NodeId> all(g.num_nodes());
  for (NodeId v = 0; v < all.size(); ++v) all[v] = v;
  EXPECT_TRUE(induced_subgraph(g, all) == g);
}

TEST(InducedSubgraph, HalfSampleMatchesPairScan) {
  GraphGenSpec spec;
  spec.model = GraphModel::kPlantedBlocks;
  spec.n = 400;
  spec.blocks = 4;
  spec.p_in = 0.1;
  spec.p_out = 0.01;
  spec.seed = 9;
  const SocialGraph g = generate_graph(spec).graph;
  std::mt19937_64 rng(1);
  std::vector<NodeId> keep;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (rng() % 2) keep.push_back(v);
  }
  std::size_t oracle = 0;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = i + 1; j < keep.size(); ++j) oracle += g.has_edge(keep[i], keep[j]);
  }
  const SocialGraph s = induced_subgraph(g, keep);
  EXPECT_EQ(s.num_edges(), oracle);
  for (const auto& e : s.edges()) {
    EXPECT_TRUE(g.has_edge(g.dense_id(s.external_id(e.u)), g.dense_id(s.external_id(e.v))));
  }
}

TEST(LabelGraph, SnapshotAndEarliestDay) {
  const LabelGraph l(4, 7, {{0, 1, 3}, {1, 0, 1}, {2, 3, 7}, {1, 2, 0}});
  EXPECT_EQ(l.num_edges(), 3u);
  EXPECT_EQ(l.count_through(0), 1u);
  EXPECT_EQ(l.count_through(1), 2u);
  EXPECT_EQ(l.snapshot(6).num_edges(), 2u);
  EXPECT_EQ(l.snapshot(7).num_edges(), l.num_edges());
  const LabelGraph early = l.snapshot(1);
  for (const auto& e : early.edges()) EXPECT_LE(e.day, 1);
  for (const auto& e : l.edges()) {
    EXPECT_LT(e.u, e.v);
    if (e.u == 0 && e.v == 1) { EXPECT_EQ(e.day, 1); }
  }
}

TEST(LabelGraph, RejectsInvalidEdges) {
  EXPECT_THROW(LabelGraph(3, 7, {{0, 3, 1}}), std::invalid_argument);
  EXPECT_THROW(LabelGraph(3, 7, {{1, 1, 1}}), std::invalid_argument);
  EXPECT_THROW(LabelGraph(3, 7, {{0, 1, 8}}), std::invalid_argument);
  EXPECT_THROW(LabelGraph(3, 7, {{0, 1, -1}}), std::invalid_argument);
}

}  // namespace
}  // namespace linklouvain
