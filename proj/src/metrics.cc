#include "linklouvain/metrics.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "linklouvain/errors.h"
#include "linklouvain/graph_io.h"

namespace linklouvain {

double true_ate(const ExperimentOutcome& o) {
  if (!o.has_counterfactuals() || o.y0.empty()) {
    throw std::invalid_argument("true_ate: counterfactual outcomes missing");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < o.y0.size(); ++i) sum += o.y1[i] - o.y0[i];
  return sum / static_cast<double>(o.y0.size());
}

namespace {

// 1 = treatment side, 2 = control side, 0 = neither.
std::vector<std::uint8_t> side_of_groups(std::size_t num_groups,
                                         const std::vector<GroupId>& treat,
                                         const std::vector<GroupId>& control) {
  std::vector<std::uint8_t> side(num_groups, 0);
  for (GroupId g : treat) {
    if (g >= num_groups) throw std::invalid_argument("estimate_ate: treatment group out of range");
    side[g] = 1;
  }
  for (GroupId g : control) {
    if (g >= num_groups) throw std::invalid_argument("estimate_ate: control group out of range");
    if (side[g] == 1) throw std::invalid_argument("estimate_ate: treatment and control overlap");
    side[g] = 2;
  }
  return side;
}

}  // namespace

double estimate_ate(const GroupAssignment& a, const std::vector<GroupId>& treat_groups,
                    const std::vector<GroupId>& control_groups, const ExperimentOutcome& o) {
  if (o.size() != a.num_nodes()) throw std::invalid_argument("estimate_ate: size mismatch");
  const auto side = side_of_groups(a.num_groups, treat_groups, control_groups);
  double sum_t = 0.0, sum_c = 0.0;
  std::size_t m = 0, n = 0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const GroupId g = a.node_to_group[i];
    if (g == kExcludedGroup) continue;
    if (side[g] == 1) {
      sum_t += o.observed[i];
      ++m;
    } else if (side[g] == 2) {
      sum_c += o.observed[i];
      ++n;
    }
  }
  if (m == 0 || n == 0) throw std::invalid_argument("estimate_ate: empty treatment or control side");
  return sum_t / static_cast<double>(m) - sum_c / static_cast<double>(n);
}

double estimate_ate_cluster_means(const GroupAssignment& a,
                                  const std::vector<GroupId>& treat_groups,
                                  const std::vector<GroupId>& control_groups,
                                  const ExperimentOutcome& o) {
  if (o.size() != a.num_nodes()) throw std::invalid_argument("estimate_ate: size mismatch");
  const auto side = side_of_groups(a.num_groups, treat_groups, control_groups);
  std::vector<double> sums(a.num_clusters(), 0.0);
  for (std::size_t i = 0; i < o.size(); ++i) sums[a.node_to_cluster[i]] += o.observed[i];
  double mean_t = 0.0, mean_c = 0.0;
  std::size_t kt = 0, kc = 0;
  for (std::size_t c = 0; c < a.num_clusters(); ++c) {
    const GroupId g = a.cluster_to_group[c];
    if (g == kExcludedGroup) continue;
    const double mean = sums[c] / static_cast<double>(a.cluster_sizes[c]);
    if (side[g] == 1) {
      mean_t += mean;
      ++kt;
    } else if (side[g] == 2) {
      mean_c += mean;
      ++kc;
    }
  }
  if (kt == 0 || kc == 0) throw std::invalid_argument("estimate_ate: empty treatment or control side");
  return mean_t / static_cast<double>(kt) - mean_c / static_cast<double>(kc);
}

double interference(const GroupAssignment& a, const LabelGraph& l, int t) {
  if (l.num_nodes() != a.num_nodes()) {
    throw std::invalid_argument("interference: label graph and assignment disagree on node count");
  }
  std::size_t total = 0, crossing = 0;
  for (const auto& e : l.edges()) {
    if (e.day > t) continue;
    ++total;
    crossing += a.node_to_group[e.u] != a.node_to_group[e.v];
  }
  if (total == 0) {
    throw NumericError("interference undefined: label graph has no edges through day " +
                       std::to_string(t));
  }
  return static_cast<double>(crossing) / static_cast<double>(total);
}

ClusterStats make_cluster_stats(std::vector<double> sums, std::vector<double> counts) {
  if (sums.size() != counts.size()) throw std::invalid_argument("cluster stats size mismatch");
  ClusterStats cs;
  cs.k = sums.size();
  cs.sums = std::move(sums);
  cs.counts = std::move(counts);
  if (cs.k == 0) return cs;
  for (std::size_t j = 0; j < cs.k; ++j) {
    cs.mean_s += cs.sums[j];
    cs.mean_n += cs.counts[j];
  }
  cs.mean_s /= static_cast<double>(cs.k);
  cs.mean_n /= static_cast<double>(cs.k);
  if (cs.k < 2) return cs;
  for (std::size_t j = 0; j < cs.k; ++j) {
    const double ds = cs.sums[j] - cs.mean_s;
    const double dn = cs.counts[j] - cs.mean_n;
    cs.var_s += ds * ds;
    cs.var_n += dn * dn;
    cs.cov_sn += ds * dn;
  }
  const double denom = static_cast<double>(cs.k - 1);
  cs.var_s /= denom;
  cs.var_n /= denom;
  cs.cov_sn /= denom;
  return cs;
}

ClusterStats cluster_stats(const GroupAssignment& a, GroupId group, const std::vector<double>& y) {
  if (group >= a.num_groups) throw std::invalid_argument("cluster_stats: group out of range");
  if (y.size() != a.num_nodes()) throw std::invalid_argument("cluster_stats: size mismatch");
  std::vector<double> sum_by_cluster(a.num_clusters(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) sum_by_cluster[a.node_to_cluster[i]] += y[i];
  std::vector<double> sums, counts;
  for (std::size_t c = 0; c < a.num_clusters(); ++c) {
    if (a.cluster_to_group[c] != group) continue;
    sums.push_back(sum_by_cluster[c]);
    counts.push_back(static_cast<double>(a.cluster_sizes[c]));
  }
  return make_cluster_stats(std::move(sums), std::move(counts));
}

ClusterStats cluster_stats_included(const GroupAssignment& a, const std::vector<double>& y) {
  if (y.size() != a.num_nodes()) throw std::invalid_argument("cluster_stats: size mismatch");
  std::vector<double> sum_by_cluster(a.num_clusters(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) sum_by_cluster[a.node_to_cluster[i]] += y[i];
  std::vector<double> sums, counts;
  for (std::size_t c = 0; c < a.num_clusters(); ++c) {
    if (a.cluster_to_group[c] == kExcludedGroup) continue;
    sums.push_back(sum_by_cluster[c]);
    counts.push_back(static_cast<double>(a.cluster_sizes[c]));
  }
  return make_cluster_stats(std::move(sums), std::move(counts));
}

double estimator_variance(const ClusterStats& cs) {
  if (cs.k < 2) throw NumericError("estimator_variance: need at least 2 clusters");
  if (!(cs.mean_n > 0.0)) throw NumericError("estimator_variance: mean cluster size is zero");
  const double ratio = cs.mean_s / cs.mean_n;
  // The bracket equals the sample variance of S_j - ratio * N_j; summing it
  // termwise keeps the quadratic form nonnegative under rounding.
  double quad = 0.0;
  for (std::size_t j = 0; j < cs.k; ++j) {
    const double r = (cs.sums[j] - cs.mean_s) - ratio * (cs.counts[j] - cs.mean_n);
    quad += r * r;
  }
  quad /= static_cast<double>(cs.k - 1);
  return quad / (static_cast<double>(cs.k) * cs.mean_n * cs.mean_n);
}

double estimator_variance_at_traffic(const ClusterStats& cs, double traffic) {
  if (!(traffic > 0.0)) throw NumericError("estimator_variance: traffic must be positive");
  const double v = estimator_variance(cs);
  const double k_eff = traffic / cs.mean_n;
  return v * static_cast<double>(cs.k) / k_eff;
}

std::vector<double> treated_neighbor_fraction(const SocialGraph& g,
                                              const std::vector<std::uint8_t>& treated) {
  if (treated.size() != g.num_nodes()) throw std::invalid_argument("treated flags size mismatch");
  std::vector<double> e(g.num_nodes(), 0.0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto nbrs = g.neighbors(v);
    if (nbrs.empty()) continue;
    std::size_t t = 0;
    for (NodeId u : nbrs) t += treated[u];
    e[v] = static_cast<double>(t) / static_cast<double>(nbrs.size());
  }
  return e;
}

ExposureCurve exposure_curve(const SocialGraph& g, const std::vector<std::uint8_t>& treated,
                             const std::vector<double>& outcomes, std::size_t bins) {
  if (bins < 2) throw std::invalid_argument("exposure_curve: bins must be >= 2");
  if (outcomes.size() != g.num_nodes()) throw std::invalid_argument("outcome size mismatch");
  const auto exposure = treated_neighbor_fraction(g, treated);
  ExposureCurve curve;
  curve.buckets.resize(bins);
  std::vector<double> sums(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) {
    curve.buckets[b].low = static_cast<double>(b) / static_cast<double>(bins);
    curve.buckets[b].high = static_cast<double>(b + 1) / static_cast<double>(bins);
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.degree(v) == 0) {
      ++curve.isolated_excluded;
      continue;
    }
    auto b = static_cast<std::size_t>(exposure[v] * static_cast<double>(bins));
    if (b >= bins) b = bins - 1;
    sums[b] += outcomes[v];
    ++curve.buckets[b].count;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (curve.buckets[b].count > 0) {
      curve.buckets[b].mean_outcome = sums[b] / static_cast<double>(curve.buckets[b].count);
    }
  }
  return curve;
}

nlohmann::json to_json(const ExposureCurve& c) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : c.buckets) {
    buckets.push_back({{"bucket_low", b.low},
                       {"bucket_high", b.high},
                       {"mean_outcome", b.count ? nlohmann::json(b.mean_outcome) : nlohmann::json()},
                       {"count", b.count}});
  }
  return {{"buckets", buckets}, {"isolated_excluded", c.isolated_excluded}};
}

nlohmann::json to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json();
  };
  nlohmann::json variances = nlohmann::json::array();
  for (const auto& v : r.group_variance) variances.push_back(opt(v));
  return {{"ate_hat", r.ate_hat},
          {"true_ate", opt(r.true_ate)},
          {"interference", opt(r.interference)},
          {"group_variance", variances},
          {"exposure_curve", to_json(r.exposure)},
          {"config", r.config}};
}

void write_exposure_csv(const ExposureCurve& c, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "bucket_low,bucket_high,mean_outcome,count\n";
  for (const auto& b : c.buckets) {
    out << format_double(b.low) << ',' << format_double(b.high) << ','
        << (b.count ? format_double(b.mean_outcome) : std::string()) << ',' << b.count << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace linklouvain
