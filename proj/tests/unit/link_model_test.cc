#include <cmath>
#include <random>

#include "linklouvain/errors.h"
#include "linklouvain/generate.h"
#include "linklouvain/link_model.h"
#include "linklouvain/link_training.h"
#include "test_util.h"

namespace linklouvain {
namespace {

GeneratedGraph small_world(std::size_t n, std::uint64_t seed, std::size_t dim = 4) {
  GraphGenSpec spec;
  spec.n = n;
  spec.m = 4;
  spec.feature_dim = dim;
  spec.seed = seed;
  return generate_graph(spec);
}

LinkModelConfig config_for(ModelKind kind, std::size_t dim, int hops = 2) {
  LinkModelConfig c;
  c.kind = kind;
  c.hops = hops;
  c.width = 5;
  c.head_hidden = 3;
  c.feature_dim = dim;
  c.fanout = 0;
  return c;
}

TEST(LinkModel, ZeroWeightsGiveOneHalf) {
  const GeneratedGraph gen = small_world(300, 1);
  const LinkModel m(config_for(ModelKind::kNodeLabeling, 4));
  const ScoredEdgeSet s = score_edges(m, gen.graph);
  ASSERT_EQ(s.size(), gen.graph.num_edges());
  for (const auto& e : s.edges) EXPECT_EQ(e.score, 0.5);
}

TEST(LinkModel, HandComputedPath) {
  // Path 0 - 1 - 2 with scalar features 1, 2, 3; targets 0 and 2; K = 1.
  std::vector<WeightedEdge> edges = {{0, 1, 1.0}, {1, 2, 1.0}};
  const FeatureMatrix x{3, 1, {1.0, 2.0, 3.0}};
  const SocialGraph g = SocialGraph::from_edges(3, edges).with_features(x);
  LinkModelConfig c = config_for(ModelKind::kNodeLabeling, 1, 1);
  c.width = 2;
  c.head_hidden = 0;
  LinkModel m(c);
  ASSERT_EQ(m.layer_input_width(1), 10u);
  // Column 0 is the feature; columns 1..9 are roles d_a * 3 + d_b.
  m.layer_weight(1)(0, 0) = 1.0;
  m.layer_weight(1)(1, 0) = -1.0;
  m.layer_weight(1)(1, 1 + 2) = 4.0;  // role (0, 2): target A
  m.layer_bias(1)(1) = 0.5;
  m.output_weight() << 1.0, 2.0, -1.0, 0.5;
  m.output_bias() = 0.1;
  // h_A = relu([1.5, -1.5 + 0.5 * 4 + 0.5]) = [1.5, 1]
  // h_B = relu([2.5, -2.5 + 0.5]) = [2.5, 0]
  // logit(A, B) = 1.5 + 2 - 2.5 + 0 + 0.1 = 1.1
  // logit(B, A) = 2.5 + 0 - 1.5 + 0.5 + 0.1 = 1.6
  const double expected = 1.0 / (1.0 + std::exp(-1.35));
  const EnclosingSubgraph sg = extract_enclosing_subgraph(g, 0, 2, 1);
  EXPECT_NEAR(forward_logit(m, sg, x), 1.35, 1e-12);
  EXPECT_NEAR(forward(m, sg, x), expected, 1e-12);
  const LinkScorer scorer(m, g);
  EXPECT_NEAR(scorer.score(0, 2), expected, 1e-12);
  EXPECT_EQ(scorer.score(2, 0), scorer.score(0, 2));
}

TEST(LinkModel, OutputIsProbabilityAndSymmetric) {
  const GeneratedGraph gen = small_world(800, 2);
  for (ModelKind kind : {ModelKind::kNodeLabeling, ModelKind::kNoLabels, ModelKind::kFeatureOnly}) {
    LinkModelConfig c = config_for(kind, 4);
    c.fanout = 6;
    const LinkModel m = LinkModel::initialized(c, 3);
    const LinkScorer scorer(m, gen.graph);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
      const NodeId a = rng() % 800, b = rng() % 800;
      if (a == b) continue;
      const double s = scorer.score(a, b);
      EXPECT_GT(s, 0.0);
      EXPECT_LT(s, 1.0);
      EXPECT_EQ(s, scorer.score(b, a));
    }
  }
}

// Relabels the non-target local nodes of sg by a random permutation.
EnclosingSubgraph permuted(const EnclosingSubgraph& sg, std::uint64_t seed) {
  const std::size_t n = sg.size();
  std::vector<std::uint32_t> order(n - 2);
  std::iota(order.begin(), order.end(), 2u);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::uint32_t> old_of = {0, 1};
  old_of.insert(old_of.end(), order.begin(), order.end());
  std::vector<std::uint32_t> new_of(n);
  for (std::uint32_t i = 0; i < n; ++i) new_of[old_of[i]] = i;
  EnclosingSubgraph p = sg;
  p.offsets.assign(1, 0);
  p.adjacency.clear();
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t o = old_of[i];
    p.nodes[i] = sg.nodes[o];
    p.dist_a[i] = sg.dist_a[o];
    p.dist_b[i] = sg.dist_b[o];
    auto nb = sg.neighbors(o);
    std::vector<std::uint32_t> mapped;
    for (auto u : nb) mapped.push_back(new_of[u]);
    std::shuffle(mapped.begin(), mapped.end(), rng);
    p.adjacency.insert(p.adjacency.end(), mapped.begin(), mapped.end());
    p.offsets.push_back(static_cast<std::uint32_t>(p.adjacency.size()));
  }
  return p;
}

TEST(LinkModel, PermutationInvariance) {
  const GeneratedGraph gen = small_world(500, 5);
  const LinkModel m = LinkModel::initialized(config_for(ModelKind::kNodeLabeling, 4), 6);
  const auto edges = gen.graph.edges();
  for (std::size_t i = 0; i < edges.size(); i += 50) {
    const EnclosingSubgraph sg = extract_enclosing_subgraph(gen.graph, edges[i].u, edges[i].v, 2);
    const double base = forward(m, sg, gen.graph.feature_matrix());
    for (std::uint64_t s = 0; s < 3; ++s) {
      EXPECT_NEAR(forward(m, permuted(sg, s), gen.graph.feature_matrix()), base, 1e-12);
    }
  }
}

TEST(LinkModel, BatchScoringMatchesPerEdgeForward) {
  GraphGenSpec spec;
  spec.n = 12000;
  spec.feature_dim = 4;
  spec.seed = 7;
  const SocialGraph g = generate_graph(spec).graph;
  ASSERT_GE(g.num_edges(), 100000u);
  LinkModelConfig c = config_for(ModelKind::kNodeLabeling, 4);
  c.fanout = 10;
  const LinkModel m = LinkModel::initialized(c, 8);
  const ScoredEdgeSet batch = score_edges(m, g);
  const LinkScorer scorer(m, g);
  const auto edges = g.edges();
  ASSERT_EQ(batch.size(), edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    ASSERT_EQ(batch.edges[i].u, edges[i].u);
    ASSERT_EQ(batch.edges[i].v, edges[i].v);
    if (i % 7 == 0) {
      const EnclosingSubgraph sg = scorer.subgraph(edges[i].u, edges[i].v);
      ASSERT_EQ(batch.edges[i].score, forward(m, sg, g.feature_matrix())) << i;
    }
  }
}

TEST(LinkModel, GradientMatchesFiniteDifferences) {
  const GeneratedGraph gen = small_world(400, 9);
  std::vector<LabeledPair> pairs;
  const auto edges = gen.graph.edges();
  for (std::size_t i = 0; i < 12; ++i) {
    pairs.push_back({edges[i * 31].u, edges[i * 31].v, static_cast<double>(i % 2)});
  }
  for (ModelKind kind : {ModelKind::kNodeLabeling, ModelKind::kNoLabels, ModelKind::kFeatureOnly}) {
    for (std::uint64_t point = 0; point < 3; ++point) {
      LinkModel m = LinkModel::initialized(config_for(kind, 4), 100 + point);
      std::mt19937_64 rng(point);
      std::normal_distribution<double> nd(0.0, 0.1);
      for (double& p : m.parameters()) p += nd(rng);
      std::vector<double> grad;
      loss_and_gradient(m, gen.graph, pairs, &grad);
      ASSERT_EQ(grad.size(), m.num_parameters());
      double worst = 0.0;
      for (std::size_t i = 0; i < grad.size(); ++i) {
        const double h = 1e-6;
        const double saved = m.parameters()[i];
        m.parameters()[i] = saved + h;
        const double up = loss_and_gradient(m, gen.graph, pairs, nullptr);
        m.parameters()[i] = saved - h;
        const double down = loss_and_gradient(m, gen.graph, pairs, nullptr);
        m.parameters()[i] = saved;
        const double numeric = (up - down) / (2 * h);
        const double scale = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
        worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
      }
      EXPECT_LE(worst, 1e-4) << to_string(kind) << " point " << point;
    }
  }
}

TEST(LinkModel, JsonRoundTrip) {
  testing::TempDir dir;
  const GeneratedGraph gen = small_world(300, 10);
  const LinkModel m = LinkModel::initialized(config_for(ModelKind::kNoLabels, 4), 11);
  m.save(dir.file("m.json"));
  const LinkModel back = LinkModel::load(dir.file("m.json"));
  EXPECT_EQ(back.parameters(), m.parameters());
  EXPECT_EQ(back.kind(), m.kind());
  const auto a = score_edges(m, gen.graph);
  const auto b = score_edges(back, gen.graph);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.edges[i].score, b.edges[i].score);

  EXPECT_THROW(LinkModel::load(dir.file("none.json")), MissingInputError);
  nlohmann::json doc = m.to_json();
  doc["version"] = 99;
  EXPECT_THROW(LinkModel::from_json(doc), ConfigError);
  EXPECT_THROW(LinkModel::from_json(nlohmann::json::array()), ConfigError);
  testing::write_text(dir.file("bad.json"), "{not json");
  EXPECT_THROW(LinkModel::load(dir.file("bad.json")), ConfigError);
}

TEST(LinkModel, RejectsBadConfig) {
  LinkModelConfig c;
  c.hops = 0;
  EXPECT_THROW(LinkModel{c}, ConfigError);
  c.hops = 2;
  c.width = 0;
  EXPECT_THROW(LinkModel{c}, ConfigError);
  EXPECT_THROW(parse_model_kind("gcn"), ConfigError);
  const GeneratedGraph gen = small_world(100, 1, 3);
  const LinkModel m(config_for(ModelKind::kNodeLabeling, 4));
  EXPECT_THROW(LinkScorer(m, gen.graph), std::invalid_argument);
}

TEST(Scores, RoundTripAndErrors) {
  testing::TempDir dir;
  const GeneratedGraph gen = small_world(300, 12);
  const LinkModel m = LinkModel::initialized(config_for(ModelKind::kNodeLabeling, 4), 13);
  const ScoredEdgeSet s = score_edges(m, gen.graph);
  write_scores(s, gen.graph, dir.file("s.tsv"));
  const ScoredEdgeSet back = load_scores(dir.file("s.tsv"), gen.graph);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(back.edges[i].score, s.edges[i].score);
  testing::write_text(dir.file("bad.tsv"), "0\t1\n");
  EXPECT_THROW(load_scores(dir.file("bad.tsv"), gen.graph), ParseError);
}

}  // namespace
}  // namespace linklouvain
