#include <random>

#include "../support/oracles.h"
#include "linklouvain/assign.h"
#include "linklouvain/errors.h"
#include "linklouvain/metrics.h"
#include "test_util.h"

namespace linklouvain {
namespace {

GroupAssignment fixed_groups(const std::vector<GroupId>& node_groups) {
  std::vector<std::uint64_t> ids(node_groups.size());
  std::iota(ids.begin(), ids.end(), 0);
  GroupAssignment a = user_level_randomization(node_groups.size(), 1, 0);
  a.num_groups = *std::max_element(node_groups.begin(), node_groups.end()) + 1;
  a.cluster_to_group = node_groups;
  a.node_to_group = node_groups;
  a.group_node_counts.assign(a.num_groups, 0);
  a.group_cluster_counts.assign(a.num_groups, 0);
  for (GroupId g : node_groups) {
    ++a.group_node_counts[g];
    ++a.group_cluster_counts[g];
  }
  return a;
}

TEST(TrueAte, MeanOfDifferences) {
  ExperimentOutcome o;
  o.observed = {0, 0, 0};
  o.y0 = {1, 2, 3};
  o.y1 = {2, 2, 6};
  EXPECT_DOUBLE_EQ(true_ate(o), 4.0 / 3.0);
  o.y1 = o.y0;
  EXPECT_DOUBLE_EQ(true_ate(o), 0.0);
  o.y1.clear();
  EXPECT_THROW(true_ate(o), std::invalid_argument);
}

TEST(EstimateAte, HandExample) {
  const GroupAssignment a = fixed_groups({0, 0, 0, 1, 1, 1});
  ExperimentOutcome o;
  o.observed = {3, 4, 5, 1, 2, 3};
  EXPECT_DOUBLE_EQ(estimate_ate(a, {0}, {1}, o), 2.0);
  EXPECT_DOUBLE_EQ(estimate_ate(a, {1}, {0}, o), -2.0);
  EXPECT_DOUBLE_EQ(estimate_ate_cluster_means(a, {0}, {1}, o), 2.0);
  EXPECT_THROW(estimate_ate(a, {0}, {0}, o), std::invalid_argument);
  EXPECT_THROW(estimate_ate(a, {0}, {}, o), std::invalid_argument);
  EXPECT_THROW(estimate_ate(a, {0}, {2}, o), std::invalid_argument);
}

TEST(Interference, HandCases) {
  const LabelGraph tri(3, 5, {{0, 1, 1}, {1, 2, 2}, {0, 2, 3}});
  EXPECT_NEAR(interference(fixed_groups({0, 0, 1}), tri, 5), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(interference(fixed_groups({0, 0, 1}), tri, 1), 0.0, 1e-15);
  EXPECT_NEAR(interference(fixed_groups({0, 0, 0}), tri, 5), 0.0, 1e-15);
  EXPECT_THROW(interference(fixed_groups({0, 0, 1}), tri, 0), NumericError);
  EXPECT_THROW(interference(fixed_groups({0, 1}), tri, 5), std::invalid_argument);
}

TEST(Interference, BoundedAndInvariantToGroupRelabeling) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LabelEdge> edges;
    for (int i = 0; i < 300; ++i) {
      const NodeId u = rng() % 100;
      const NodeId v = (u + 1 + rng() % 99) % 100;
      edges.push_back({u, v, static_cast<int>(rng() % 10)});
    }
    const LabelGraph l(100, 9, edges);
    std::vector<GroupId> groups(100);
    for (auto& g : groups) g = rng() % 4;
    std::vector<GroupId> swapped = groups;
    for (auto& g : swapped) g = 3 - g;
    const double x = interference(fixed_groups(groups), l, 9);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    EXPECT_DOUBLE_EQ(x, interference(fixed_groups(swapped), l, 9));
  }
}

TEST(Variance, UnitClustersReduceToSampleVarianceOverK) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(2.0, 3.0);
  std::vector<double> s(500);
  for (auto& x : s) x = z(rng);
  const ClusterStats cs = make_cluster_stats(s, std::vector<double>(500, 1.0));
  EXPECT_NEAR(estimator_variance(cs), cs.var_s / 500.0, 1e-15);
  EXPECT_NEAR(estimator_variance_at_traffic(cs, 50.0), cs.var_s / 50.0, 1e-15);
}

TEST(Variance, IdenticalClustersGiveZero) {
  const ClusterStats cs = make_cluster_stats({6, 6, 6, 6}, {3, 3, 3, 3});
  EXPECT_NEAR(estimator_variance(cs), 0.0, 1e-18);
  // Proportional clusters keep the ratio fixed, so the delta method gives 0.
  EXPECT_NEAR(estimator_variance(make_cluster_stats({2, 4, 8}, {1, 2, 4})), 0.0, 1e-18);
}

TEST(Variance, NonnegativeAndNearBootstrap) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> s, n;
    for (int j = 0; j < 2000; ++j) {
      const double size = 1 + static_cast<double>(rng() % 30);
      double total = 0;
      for (int i = 0; i < size; ++i) total += (rng() % 1000) / 1000.0 + (j % 3);
      s.push_back(total);
      n.push_back(size);
    }
    const ClusterStats cs = make_cluster_stats(s, n);
    const double v = estimator_variance(cs);
    EXPECT_GT(v, 0.0);
    const double boot = oracle::bootstrap_ratio_variance(s, n, 2000, trial);
    EXPECT_NEAR(v / boot, 1.0, 0.1);
  }
}

TEST(Variance, TrafficScaling) {
  const ClusterStats cs = make_cluster_stats({1, 5, 2, 9, 4}, {1, 3, 2, 4, 2});
  const double v = estimator_variance(cs);
  const double total_n = 12.0;
  EXPECT_NEAR(estimator_variance_at_traffic(cs, total_n), v, 1e-15);
  EXPECT_NEAR(estimator_variance_at_traffic(cs, 2 * total_n), v / 2, 1e-15);
  EXPECT_THROW(estimator_variance_at_traffic(cs, 0.0), NumericError);
  EXPECT_THROW(estimator_variance(make_cluster_stats({1}, {1})), NumericError);
  EXPECT_THROW(estimator_variance(make_cluster_stats({0, 0}, {0, 0})), NumericError);
  EXPECT_THROW(make_cluster_stats({1, 2}, {1}), std::invalid_argument);
}

TEST(Variance, ClusterStatsFromAssignment) {
  const Clustering c = make_clustering({0, 0, 1, 2, 2, 2});
  GroupAssignment a = merge_random(c, 3, 1);
  const std::vector<double> y = {1, 2, 3, 4, 5, 6};
  std::size_t clusters = 0;
  for (GroupId g = 0; g < 3; ++g) {
    const ClusterStats cs = cluster_stats(a, g, y);
    clusters += cs.k;
    ASSERT_EQ(cs.k, 1u);
    const double expect = cs.counts[0] == 2 ? 3.0 : cs.counts[0] == 1 ? 3.0 : 15.0;
    EXPECT_DOUBLE_EQ(cs.sums[0], expect);
  }
  EXPECT_EQ(clusters, 3u);
  EXPECT_EQ(cluster_stats_included(a, y).k, 3u);
  EXPECT_THROW(cluster_stats(a, 3, y), std::invalid_argument);
}

TEST(Exposure, HandCurve) {
  // Star centre 0 with leaves 1..4; leaves 1 and 2 treated; node 5 isolated.
  const SocialGraph g =
      SocialGraph::from_edges(6, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
  const std::vector<std::uint8_t> treated = {1, 1, 1, 0, 0, 1};
  const std::vector<double> y = {10, 1, 2, 3, 4, 99};
  const ExposureCurve c = exposure_curve(g, treated, y, 2);
  EXPECT_EQ(c.isolated_excluded, 1u);
  ASSERT_EQ(c.buckets.size(), 2u);
  // Centre exposure 0.5 lands in the upper bucket with the leaves (exposure 1).
  EXPECT_EQ(c.buckets[0].count, 0u);
  EXPECT_EQ(c.buckets[1].count, 5u);
  EXPECT_DOUBLE_EQ(c.buckets[1].mean_outcome, 4.0);
  const auto frac = treated_neighbor_fraction(g, treated);
  EXPECT_DOUBLE_EQ(frac[0], 0.5);
  EXPECT_DOUBLE_EQ(frac[3], 1.0);
  EXPECT_DOUBLE_EQ(frac[5], 0.0);
  EXPECT_THROW(exposure_curve(g, treated, y, 1), std::invalid_argument);
  const auto doc = to_json(c);
  EXPECT_TRUE(doc["buckets"][0]["mean_outcome"].is_null());
}

}  // namespace
}  // namespace linklouvain
