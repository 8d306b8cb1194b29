#include <algorithm>
#include <queue>
#include <random>
#include <set>

#include "linklouvain/enclosing_subgraph.h"
#include "linklouvain/generate.h"
#include "test_util.h"

namespace linklouvain {
namespace {

std::vector<int> bfs_distances(const SocialGraph& g, NodeId s) {
  std::vector<int> d(g.num_nodes(), -1);
  std::queue<NodeId> q;
  d[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop();
    for (NodeId u : g.neighbors(v)) {
      if (d[u] < 0) {
        d[u] = d[v] + 1;
        q.push(u);
      }
    }
  }
  return d;
}

int capped(int d, int hops) { return d < 0 || d > hops ? hops + 1 : d; }

// Checks sg against a double-BFS oracle on g (no truncation, no fanout).
void expect_matches_oracle(const SocialGraph& g, NodeId a, NodeId b, int hops,
                           const EnclosingSubgraph& sg) {
  const auto da = bfs_distances(g, a);
  const auto db = bfs_distances(g, b);
  std::vector<NodeId> expected;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (v == a || v == b) continue;
    if ((da[v] >= 0 && da[v] <= hops) || (db[v] >= 0 && db[v] <= hops)) expected.push_back(v);
  }
  ASSERT_EQ(sg.size(), expected.size() + 2);
  EXPECT_EQ(sg.nodes[0], a);
  EXPECT_EQ(sg.nodes[1], b);
  EXPECT_TRUE(std::equal(expected.begin(), expected.end(), sg.nodes.begin() + 2));
  for (std::size_t i = 0; i < sg.size(); ++i) {
    EXPECT_EQ(sg.dist_a[i], capped(da[sg.nodes[i]], hops));
    EXPECT_EQ(sg.dist_b[i], capped(db[sg.nodes[i]], hops));
    std::vector<std::uint32_t> oracle;
    for (std::size_t j = 0; j < sg.size(); ++j) {
      if (g.has_edge(sg.nodes[i], sg.nodes[j])) oracle.push_back(static_cast<std::uint32_t>(j));
    }
    const auto nb = sg.neighbors(static_cast<std::uint32_t>(i));
    std::vector<std::uint32_t> got(nb.begin(), nb.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, oracle);
  }
}

TEST(EnclosingSubgraph, ExampleWithCommonNeighbors) {
  // A=0, B=1, C=2, D=3, E=4.
  const SocialGraph g = testing::graph_of(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}});
  const EnclosingSubgraph sg = extract_enclosing_subgraph(g, 0, 1, 1);
  ASSERT_EQ(sg.size(), 5u);
  EXPECT_EQ(sg.dist_a[0], 0);
  EXPECT_EQ(sg.dist_b[1], 0);
  for (std::size_t i = 2; i < 5; ++i) {
    const NodeId v = sg.nodes[i];
    if (v == 2 || v == 3) {
      EXPECT_EQ(sg.dist_a[i], 1);
      EXPECT_EQ(sg.dist_b[i], 1);
      EXPECT_EQ(node_label_index(sg.dist_a[i], sg.dist_b[i], 1), 4u);
    } else {
      EXPECT_EQ(v, 4u);
      EXPECT_EQ(sg.dist_a[i], 1);
      EXPECT_EQ(sg.dist_b[i], 2);
      EXPECT_EQ(node_label_index(sg.dist_a[i], sg.dist_b[i], 1), 5u);
    }
  }
  expect_matches_oracle(g, 0, 1, 1, sg);
}

TEST(EnclosingSubgraph, IsolatedTargets) {
  const SocialGraph g = testing::graph_of(4, {{2, 3}});
  const EnclosingSubgraph sg = extract_enclosing_subgraph(g, 0, 1, 2);
  EXPECT_EQ(sg.size(), 2u);
  EXPECT_TRUE(sg.adjacency.empty());
  EXPECT_EQ(sg.dist_a[1], 3);
}

TEST(EnclosingSubgraph, RandomGraphMatchesDoubleBfs) {
  std::mt19937_64 rng(7);
  std::vector<WeightedEdge> e;
  for (int i = 0; i < 400; ++i) {
    e.push_back({static_cast<NodeId>(rng() % 200), static_cast<NodeId>(rng() % 200), 1.0});
  }
  const SocialGraph g = SocialGraph::from_edges(200, e);
  const NeighborView view(g, 0, 0);
  SubgraphExtractor ex(view);
  EnclosingSubgraph sg;
  for (int trial = 0; trial < 60; ++trial) {
    // Repeat `a` for runs of pairs to exercise reuse of the first search.
    const NodeId a = static_cast<NodeId>((trial / 4) * 13 % 200);
    NodeId b = static_cast<NodeId>(rng() % 200);
    if (b == a) b = (b + 1) % 200;
    for (int hops : {1, 2}) {
      ex.extract(a, b, hops, 100000, 0, sg);
      expect_matches_oracle(g, a, b, hops, sg);
    }
  }
}

TEST(EnclosingSubgraph, TruncationKeepsTargetsAndIsDeterministic) {
  const SocialGraph g = testing::star(100);
  const EnclosingSubgraph s1 = extract_enclosing_subgraph(g, 0, 5, 1, 10, 42);
  const EnclosingSubgraph s2 = extract_enclosing_subgraph(g, 0, 5, 1, 10, 42);
  EXPECT_TRUE(s1.truncated);
  EXPECT_EQ(s1.size(), 10u);
  EXPECT_EQ(s1.nodes[0], 0u);
  EXPECT_EQ(s1.nodes[1], 5u);
  EXPECT_EQ(s1.nodes, s2.nodes);
  EXPECT_TRUE(std::is_sorted(s1.nodes.begin() + 2, s1.nodes.end()));
  const EnclosingSubgraph s3 = extract_enclosing_subgraph(g, 0, 5, 1, 10, 43);
  EXPECT_NE(s1.nodes, s3.nodes);
}

TEST(EnclosingSubgraph, RejectsBadArguments) {
  const SocialGraph g = testing::path(3);
  EXPECT_THROW(extract_enclosing_subgraph(g, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW(extract_enclosing_subgraph(g, 0, 3, 1), std::invalid_argument);
  EXPECT_THROW(extract_enclosing_subgraph(g, 0, 1, -1), std::invalid_argument);
  EXPECT_THROW(extract_enclosing_subgraph(g, 0, 1, 1, 1), std::invalid_argument);
}

TEST(EnclosingSubgraph, EveryNodeWithinHopsOfATarget) {
  GraphGenSpec spec;
  spec.n = 3000;
  spec.seed = 2;
  const SocialGraph g = generate_graph(spec).graph;
  const NeighborView view(g, 10, 1);
  SubgraphExtractor ex(view);
  EnclosingSubgraph sg;
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); i += 97) {
    ex.extract(edges[i].u, edges[i].v, 2, 512, 3, sg, false);
    EXPECT_LE(sg.size(), 512u);
    for (std::size_t j = 0; j < sg.size(); ++j) {
      EXPECT_LE(std::min(sg.dist_a[j], sg.dist_b[j]), 2);
      const auto label = node_label(sg.dist_a[j], sg.dist_b[j], 2);
      EXPECT_DOUBLE_EQ(std::accumulate(label.begin(), label.end(), 0.0), 1.0);
    }
  }
}

TEST(NodeLabel, Indices) {
  EXPECT_EQ(node_label_index(0, 1, 1), 1u);
  EXPECT_EQ(node_label_index(1, 1, 1), 4u);
  EXPECT_EQ(node_label_index(1, 2, 1), 5u);
  EXPECT_EQ(node_label(1, 0, 1).size(), 9u);
  EXPECT_THROW(node_label_index(3, 0, 1), std::out_of_range);
  EXPECT_THROW(node_label_index(0, -1, 1), std::out_of_range);
  std::set<std::size_t> seen;
  for (int x = 0; x <= 3; ++x) {
    for (int y = 0; y <= 3; ++y) seen.insert(node_label_index(x, y, 2));
  }
  EXPECT_EQ(seen.size(), 16u);
}

TEST(NeighborView, CapsAndSubsets) {
  GraphGenSpec spec;
  spec.n = 5000;
  spec.seed = 3;
  const SocialGraph g = generate_graph(spec).graph;
  const NeighborView view(g, 8, 77);
  const NeighborView again(g, 8, 77);
  EXPECT_FALSE(view.exact());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto kept = view.out(v);
    EXPECT_EQ(kept.size(), std::min<std::size_t>(g.degree(v), 8));
    EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end()));
    for (NodeId u : kept) EXPECT_TRUE(g.has_edge(v, u));
    const auto other = again.out(v);
    EXPECT_TRUE(std::equal(kept.begin(), kept.end(), other.begin(), other.end()));
  }
  const NeighborView uncapped(g, 0, 0);
  EXPECT_TRUE(uncapped.exact());
  EXPECT_EQ(uncapped.out(0).data(), g.neighbors(0).data());
}

}  // namespace
}  // namespace linklouvain
