#include <cmath>
#include <random>

#include "linklouvain/assign.h"
#include "linklouvain/campaign.h"
#include "linklouvain/errors.h"
#include "linklouvain/generate.h"
#include "linklouvain/metrics.h"
#include "test_util.h"

namespace linklouvain {
namespace {

GeneratedGraph blocks_graph(std::size_t n, std::size_t blocks, double p_in, double p_out,
                            std::uint64_t seed) {
  GraphGenSpec spec;
  spec.model = GraphModel::kPlantedBlocks;
  spec.n = n;
  spec.blocks = blocks;
  spec.p_in = p_in;
  spec.p_out = p_out;
  spec.feature_dim = 0;
  spec.seed = seed;
  return generate_graph(spec);
}

GroupAssignment by_block(const GeneratedGraph& gen, std::uint64_t seed) {
  std::vector<std::uint64_t> labels(gen.block.begin(), gen.block.end());
  return merge_random(make_clustering(labels), 2, seed);
}

TEST(InterferenceFn, Values) {
  EXPECT_DOUBLE_EQ((InterferenceFn{InterferenceKind::kZero, 3.0})(0.7), 0.0);
  EXPECT_DOUBLE_EQ((InterferenceFn{InterferenceKind::kLinear, 2.0})(0.25), 0.5);
  const InterferenceFn sat{InterferenceKind::kSaturating, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(sat(0.25), 1.0);
  EXPECT_DOUBLE_EQ(sat(0.5), 2.0);
  EXPECT_DOUBLE_EQ(sat(0.9), 2.0);
  const InterferenceFn logit{InterferenceKind::kLogistic, 3.0, 0.5, 10.0};
  EXPECT_NEAR(logit(0.0), 0.0, 1e-12);
  EXPECT_NEAR(logit(1.0), 3.0, 1e-12);
  EXPECT_NEAR(logit(0.5), 1.5, 1e-12);
  EXPECT_EQ(parse_interference_kind("saturating"), InterferenceKind::kSaturating);
  EXPECT_THROW(parse_interference_kind("quadratic"), ConfigError);
}

TEST(ResponseModel, Validation) {
  ResponseModel r;
  EXPECT_NO_THROW(validate(r));
  r.p_treated = 1.5;
  EXPECT_THROW(validate(r), ConfigError);
  r = {};
  r.horizon = 0;
  EXPECT_THROW(validate(r), ConfigError);
  r = {};
  r.noise = -1;
  EXPECT_THROW(validate(r), ConfigError);
  r = {};
  r.g = {InterferenceKind::kSaturating, 1.0, 0.0};
  EXPECT_THROW(validate(r), ConfigError);
  r = {};
  r.g = {InterferenceKind::kLogistic, 1.0, 0.5, 0.0};
  EXPECT_THROW(validate(r), ConfigError);
}

TEST(Campaign, NoInvitationsWithoutPropensity) {
  const GeneratedGraph gen = blocks_graph(500, 5, 0.2, 0.01, 1);
  ResponseModel r;
  r.p_treated = 0;
  r.p_control = 0;
  const SimRun run =
      simulate_campaign(gen.graph, user_level_randomization(500, 2, 1).treated_flags(), r, 3);
  EXPECT_EQ(run.labels.num_edges(), 0u);
}

TEST(Campaign, LabelsFollowGraphAndHorizon) {
  const GeneratedGraph gen = blocks_graph(2000, 20, 0.1, 0.005, 2);
  ResponseModel r;
  r.p_treated = 0.3;
  r.p_control = 0.1;
  r.horizon = 5;
  const auto treated = user_level_randomization(2000, 2, 4).treated_flags();
  const SimRun run = simulate_campaign(gen.graph, treated, r, 8);
  ASSERT_GT(run.labels.num_edges(), 100u);
  std::vector<int> invited_on(2000, 0);
  for (const LabelEdge& e : run.labels.edges()) {
    EXPECT_TRUE(gen.graph.has_edge(e.u, e.v));
    EXPECT_GE(e.day, 1);
    EXPECT_LE(e.day, 5);
  }
  const SimRun again = simulate_campaign(gen.graph, treated, r, 8);
  ASSERT_EQ(again.labels.num_edges(), run.labels.num_edges());
  EXPECT_EQ(again.outcome.observed, run.outcome.observed);
}

TEST(Campaign, DifferentAssignmentsShareRandomNumbers) {
  const GeneratedGraph gen = blocks_graph(1000, 10, 0.1, 0.01, 3);
  ResponseModel r;
  r.g = {InterferenceKind::kLinear, 1.0};
  const SimRun a =
      simulate_campaign(gen.graph, user_level_randomization(1000, 2, 1).treated_flags(), r, 5);
  const SimRun b =
      simulate_campaign(gen.graph, user_level_randomization(1000, 2, 2).treated_flags(), r, 5);
  EXPECT_EQ(a.outcome.y0, b.outcome.y0);
  EXPECT_EQ(a.outcome.y1, b.outcome.y1);
}

TEST(Campaign, ObservedMatchesPotentialOutcomes) {
  const GeneratedGraph gen = blocks_graph(1500, 15, 0.1, 0.01, 4);
  for (InterferenceKind kind :
       {InterferenceKind::kZero, InterferenceKind::kLinear, InterferenceKind::kSaturating}) {
    ResponseModel r;
    r.g = {kind, 1.5, 0.4};
    const auto treated = user_level_randomization(1500, 2, 6).treated_flags();
    const SimRun run = simulate_campaign(gen.graph, treated, r, 9);
    const auto e = treated_neighbor_fraction(gen.graph, treated);
    for (NodeId v = 0; v < 1500; ++v) {
      if (gen.graph.degree(v) == 0) continue;
      const double own = treated[v] ? run.outcome.y1[v] : run.outcome.y0[v];
      const double z = treated[v] ? 1.0 : 0.0;
      EXPECT_NEAR(run.outcome.observed[v], own + r.g(e[v]) - r.g(z), 1e-12);
    }
  }
}

TEST(Campaign, ExactAteWithoutNoiseOrInterference) {
  const GeneratedGraph gen = blocks_graph(800, 8, 0.1, 0.01, 5);
  ResponseModel r;
  r.tau = 1.0;
  r.noise = 0.0;
  const GroupAssignment a = user_level_randomization(800, 2, 3);
  const SimRun run = simulate_campaign(gen.graph, a.treated_flags(), r, 1);
  EXPECT_DOUBLE_EQ(run.true_ate, 1.0);
  EXPECT_DOUBLE_EQ(estimate_ate(a, {0}, {1}, run.outcome), 1.0);
}

TEST(Campaign, SaturatingTrueAte) {
  const GeneratedGraph gen = blocks_graph(800, 8, 0.1, 0.01, 6);
  ResponseModel r;
  r.tau = 0.5;
  r.g = {InterferenceKind::kSaturating, 2.0, 0.5};
  const SimRun run = simulate_campaign(
      gen.graph, user_level_randomization(800, 2, 3).treated_flags(), r, 1);
  std::size_t isolated = 0;
  for (NodeId v = 0; v < 800; ++v) isolated += gen.graph.degree(v) == 0;
  ASSERT_EQ(isolated, 0u);
  EXPECT_NEAR(run.true_ate, 2.5, 1e-12);
}

TEST(Campaign, ClusterRandomizationHasLessBias) {
  ResponseModel r;
  r.tau = 0.5;
  r.g = {InterferenceKind::kLinear, 0.5};
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const GeneratedGraph gen = blocks_graph(2000, 100, 0.5, 0.001, seed);
    const GroupAssignment cluster = by_block(gen, seed);
    const GroupAssignment user = user_level_randomization(2000, 2, seed);
    const SimRun rc = simulate_campaign(gen.graph, cluster.treated_flags(), r, seed);
    const SimRun ru = simulate_campaign(gen.graph, user.treated_flags(), r, seed);
    const double bias_c = std::abs(estimate_ate(cluster, {0}, {1}, rc.outcome) - rc.true_ate);
    const double bias_u = std::abs(estimate_ate(user, {0}, {1}, ru.outcome) - ru.true_ate);
    wins += bias_c < bias_u;
  }
  EXPECT_GE(wins, 40);
}

TEST(Campaign, UnbiasedWithoutInterference) {
  ResponseModel r;
  r.tau = 0.3;
  std::vector<double> errors;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GeneratedGraph gen = blocks_graph(2000, 20, 0.05, 0.001, seed);
    const GroupAssignment a = user_level_randomization(2000, 2, seed + 100);
    const SimRun run = simulate_campaign(gen.graph, a.treated_flags(), r, seed);
    errors.push_back(estimate_ate(a, {0}, {1}, run.outcome) - run.true_ate);
  }
  const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / 30.0;
  double var = 0;
  for (double e : errors) var += (e - mean) * (e - mean);
  const double se = std::sqrt(var / 29.0 / 30.0);
  EXPECT_LE(std::abs(mean), 3.0 * se);
}

TEST(Campaign, ExposureCurvePlateausUnderSaturation) {
  const GeneratedGraph gen = blocks_graph(4000, 40, 0.15, 0.0, 7);
  std::mt19937_64 rng(1);
  std::vector<double> block_rate(40);
  for (auto& p : block_rate) p = std::uniform_real_distribution<double>(0, 1)(rng);
  std::vector<std::uint8_t> treated(4000);
  for (NodeId v = 0; v < 4000; ++v) {
    treated[v] = std::uniform_real_distribution<double>(0, 1)(rng) < block_rate[gen.block[v]];
  }
  ResponseModel r;
  r.tau = 0.0;
  r.noise = 0.1;
  r.g = {InterferenceKind::kSaturating, 2.0, 0.5};
  const SimRun run = simulate_campaign(gen.graph, treated, r, 2);
  const ExposureCurve c = exposure_curve(gen.graph, treated, run.outcome.observed, 10);
  ASSERT_GT(c.buckets[0].count, 20u);
  ASSERT_GT(c.buckets[9].count, 20u);
  for (std::size_t b = 6; b < 10; ++b) {
    ASSERT_GT(c.buckets[b].count, 0u);
    EXPECT_NEAR(c.buckets[b].mean_outcome, c.buckets[9].mean_outcome, 0.2) << b;
  }
  EXPECT_GT(c.buckets[9].mean_outcome - c.buckets[0].mean_outcome, 1.5);
}

TEST(Campaign, RejectsShortVectors) {
  const GeneratedGraph gen = blocks_graph(100, 2, 0.1, 0.0, 1);
  EXPECT_THROW(simulate_campaign(gen.graph, std::vector<std::uint8_t>(99, 0), {}, 1),
               std::invalid_argument);
  NodeGroups groups;
  groups.block = {1, 2};
  EXPECT_THROW(simulate_campaign(gen.graph, std::vector<std::uint8_t>(100, 0), {}, 1, groups),
               std::invalid_argument);
}

}  // namespace
}  // namespace linklouvain
