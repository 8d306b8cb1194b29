#include <random>

#include "linklouvain/errors.h"
#include "linklouvain/filter.h"
#include "linklouvain/generate.h"
#include "test_util.h"

namespace linklouvain {
namespace {

ScoredEdgeSet random_scores(const SocialGraph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  ScoredEdgeSet s;
  g.for_each_edge([&](NodeId a, NodeId b, double) { s.edges.push_back({a, b, u(rng)}); });
  return s;
}

SocialGraph test_graph(std::uint64_t seed, std::size_t n = 3000) {
  GraphGenSpec spec;
  spec.n = n;
  spec.seed = seed;
  return generate_graph(spec).graph;
}

bool is_edge_subset(const SocialGraph& small, const SocialGraph& big) {
  bool ok = true;
  small.for_each_edge([&](NodeId u, NodeId v, double) { ok = ok && big.has_edge(u, v); });
  return ok;
}

TEST(Filter, GammaExtremes) {
  const SocialGraph g = test_graph(1);
  const ScoredEdgeSet s = random_scores(g, 2);
  const SocialGraph all = filter_by_score(g, s, {0.0, WeightMode::kUnit, std::nullopt});
  EXPECT_EQ(all.num_edges(), g.num_edges());
  const SocialGraph none =
      filter_by_score(g, s, {1.0 + 1e-12, WeightMode::kScore, std::nullopt});
  EXPECT_EQ(none.num_edges(), 0u);
  EXPECT_EQ(none.num_nodes(), g.num_nodes());
}

TEST(Filter, KeptCountMatchesScan) {
  const SocialGraph g = test_graph(3);
  const ScoredEdgeSet s = random_scores(g, 4);
  std::size_t oracle = 0;
  for (const auto& e : s.edges) oracle += e.score >= 0.5;
  const SocialGraph f = filter_by_score(g, s, {0.5, WeightMode::kScore, std::nullopt});
  EXPECT_EQ(f.num_edges(), oracle);
  for (const auto& e : s.edges) {
    if (e.score >= 0.5) EXPECT_EQ(f.edge_weight(e.u, e.v), e.score);
    else EXPECT_FALSE(f.has_edge(e.u, e.v));
  }
  const SocialGraph unit = filter_by_score(g, s, {0.5, WeightMode::kUnit, std::nullopt});
  unit.for_each_edge([](NodeId, NodeId, double w) { EXPECT_EQ(w, 1.0); });
}

TEST(Filter, InclusiveThreshold) {
  const SocialGraph g = testing::path(3);
  const ScoredEdgeSet s{{{0, 1, 0.5}, {1, 2, 0.4999}}};
  const SocialGraph f = filter_by_score(g, s, {0.5, WeightMode::kScore, std::nullopt});
  EXPECT_TRUE(f.has_edge(0, 1));
  EXPECT_FALSE(f.has_edge(1, 2));
}

TEST(Filter, MonotoneInGammaAndDominated) {
  const SocialGraph g = test_graph(5);
  const ScoredEdgeSet s = random_scores(g, 6);
  SocialGraph previous = g;
  for (double gamma : {0.0, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0}) {
    const SocialGraph f = filter_by_score(g, s, {gamma, WeightMode::kScore, std::nullopt});
    EXPECT_EQ(f.num_nodes(), g.num_nodes());
    EXPECT_TRUE(is_edge_subset(f, previous)) << gamma;
    // P(deg >= d) never exceeds the original's.
    std::vector<std::size_t> before(g.max_degree() + 2, 0), after(g.max_degree() + 2, 0);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      ++before[g.degree(v)];
      ++after[f.degree(v)];
    }
    std::size_t tail_before = 0, tail_after = 0;
    for (std::size_t d = before.size(); d-- > 0;) {
      tail_before += before[d];
      tail_after += after[d];
      EXPECT_LE(tail_after, tail_before);
    }
    previous = f;
  }
}

TEST(Filter, RejectsMismatchedScores) {
  const SocialGraph g = testing::path(3);
  EXPECT_THROW(filter_by_score(g, {{{0, 1, 0.5}}}, {}), std::invalid_argument);
  EXPECT_THROW(filter_by_score(g, {{{0, 1, 0.5}, {1, 2, 0.5}, {0, 2, 0.5}}}, {}),
               std::invalid_argument);
  EXPECT_THROW(filter_by_score(g, {{{0, 1, 0.5}, {1, 2, 0.5}}}, {-0.1, WeightMode::kScore, {}}),
               std::invalid_argument);
  EXPECT_THROW(validate(FilterConfig{1.5, WeightMode::kScore, std::nullopt}), ConfigError);
  EXPECT_THROW(validate(FilterConfig{0.5, WeightMode::kScore, 0}), ConfigError);
  EXPECT_THROW(parse_weight_mode("log"), ConfigError);
}

TEST(Filter, AcceptsScoresInAnyOrder) {
  const SocialGraph g = testing::path(4);
  const ScoredEdgeSet s{{{2, 3, 0.9}, {0, 1, 0.1}, {1, 2, 0.7}}};
  const SocialGraph f = filter_by_score(g, s, {0.5, WeightMode::kScore, std::nullopt});
  EXPECT_EQ(f.num_edges(), 2u);
  EXPECT_DOUBLE_EQ(f.edge_weight(2, 3), 0.9);
}

TEST(Hotspots, StarAndCycle) {
  const SocialGraph s = remove_hotspots(testing::star(9), 5);
  EXPECT_EQ(s.num_edges(), 0u);
  EXPECT_EQ(s.num_nodes(), 10u);
  const SocialGraph c = testing::graph_of(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  EXPECT_TRUE(remove_hotspots(c, 2) == c);
  EXPECT_THROW(remove_hotspots(c, 0), std::invalid_argument);
}

TEST(Hotspots, DegreeCapAndIdempotence) {
  GraphGenSpec spec;
  spec.model = GraphModel::kPreferentialAttachment;
  spec.n = 10000;
  spec.seed = 7;
  const SocialGraph g = generate_graph(spec).graph;
  ASSERT_GT(g.max_degree(), 40u);
  const SocialGraph h = remove_hotspots(g, 40);
  EXPECT_LE(h.max_degree(), 40u);
  EXPECT_EQ(h.num_nodes(), g.num_nodes());
  EXPECT_TRUE(remove_hotspots(h, 40) == h);
  // Edges survive exactly when both endpoints had degree <= 40 in g.
  g.for_each_edge([&](NodeId u, NodeId v, double) {
    EXPECT_EQ(h.has_edge(u, v), g.degree(u) <= 40 && g.degree(v) <= 40);
  });
}

TEST(ApplyFilter, ScoreThenHotspots) {
  const SocialGraph g = test_graph(8);
  const ScoredEdgeSet s = random_scores(g, 9);
  const FilterConfig cfg{0.3, WeightMode::kScore, 5};
  const SocialGraph expected = remove_hotspots(filter_by_score(g, s, cfg), 5);
  EXPECT_TRUE(apply_filter(g, s, cfg) == expected);
}

}  // namespace
}  // namespace linklouvain
