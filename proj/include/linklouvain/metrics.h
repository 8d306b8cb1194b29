#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "linklouvain/assign.h"
#include "linklouvain/graph.h"

namespace linklouvain {

// Per-node treatment flag and observed outcome. In simulation the outcomes
// under global treatment (y1) and global control (y0) are attached as well.
struct ExperimentOutcome {
  std::vector<std::uint8_t> treated;
  std::vector<double> observed;
  std::vector<double> y0;
  std::vector<double> y1;

  std::size_t size() const { return observed.size(); }
  bool has_counterfactuals() const {
    return y0.size() == observed.size() && y1.size() == observed.size();
  }
};

// Mean of y1 - y0. Throws std::invalid_argument without counterfactuals.
double true_ate(const ExperimentOutcome& o);

// Pooled difference of per-user means between the users of treat_groups and
// control_groups. Throws std::invalid_argument when the sets overlap or
// either side has no users.
double estimate_ate(const GroupAssignment& a, const std::vector<GroupId>& treat_groups,
                    const std::vector<GroupId>& control_groups, const ExperimentOutcome& o);
// Difference of unweighted means of cluster means (alternative form).
double estimate_ate_cluster_means(const GroupAssignment& a,
                                  const std::vector<GroupId>& treat_groups,
                                  const std::vector<GroupId>& control_groups,
                                  const ExperimentOutcome& o);

// |E^-| / |E_L^t|: share of label edges with day <= t whose endpoints sit in
// different groups. Excluded nodes count as their own group. Throws
// NumericError when the snapshot is empty.
double interference(const GroupAssignment& a, const LabelGraph& l, int t);

// Cluster totals S_j (outcome sum) and N_j (user count) within one group,
// plus the moments used by the delta-method variance. Variances and the
// covariance use the K - 1 denominator.
struct ClusterStats {
  std::vector<double> sums;
  std::vector<double> counts;
  std::size_t k = 0;
  double mean_s = 0.0;
  double mean_n = 0.0;
  double var_s = 0.0;
  double var_n = 0.0;
  double cov_sn = 0.0;
};

ClusterStats make_cluster_stats(std::vector<double> sums, std::vector<double> counts);
// Stats over the clusters of `group` (kExcludedGroup is not allowed).
ClusterStats cluster_stats(const GroupAssignment& a, GroupId group, const std::vector<double>& y);
// Stats over every cluster that is not excluded.
ClusterStats cluster_stats_included(const GroupAssignment& a, const std::vector<double>& y);

// Var(Ybar) ~ (1 / (K mu_N^2)) (s_S^2 - 2 (mu_S/mu_N) s_SN + (mu_S/mu_N)^2 s_N^2)
// for Ybar = sum S / sum N. Throws NumericError when K < 2 or mu_N == 0.
double estimator_variance(const ClusterStats& cs);
// The same variance for a group of `traffic` nodes whose clusters follow the
// moments of cs: K = traffic / mu_N. Throws NumericError when cs.k < 2,
// mu_N = 0 or traffic <= 0.
double estimator_variance_at_traffic(const ClusterStats& cs, double traffic);

struct ExposureBucket {
  double low = 0.0;
  double high = 0.0;
  double mean_outcome = 0.0;
  std::size_t count = 0;
};

struct ExposureCurve {
  std::vector<ExposureBucket> buckets;
  std::size_t isolated_excluded = 0;
};

// Exposure e_i = treated neighbors / degree, bucketed uniformly over [0, 1].
// Throws std::invalid_argument when bins < 2.
ExposureCurve exposure_curve(const SocialGraph& g, const std::vector<std::uint8_t>& treated,
                             const std::vector<double>& outcomes, std::size_t bins);

// Fraction of each node's neighbors that are treated (0 for isolated nodes).
std::vector<double> treated_neighbor_fraction(const SocialGraph& g,
                                              const std::vector<std::uint8_t>& treated);

struct MetricsReport {
  std::optional<double> true_ate;
  double ate_hat = 0.0;
  std::optional<double> interference;
  std::vector<std::optional<double>> group_variance;
  ExposureCurve exposure;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const ExposureCurve& c);
nlohmann::json to_json(const MetricsReport& r);
void write_exposure_csv(const ExposureCurve& c, const std::string& path);

}  // namespace linklouvain
