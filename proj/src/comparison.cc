#include "linklouvain/comparison.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "linklouvain/errors.h"
#include "linklouvain/graph_io.h"
#include "linklouvain/metrics.h"
#include "linklouvain/random.h"

namespace linklouvain {

std::string to_string(Method m) {
  switch (m) {
    case Method::kUserLevel:
      return "user_level";
    case Method::kGeoSynthetic:
      return "geo_synthetic";
    case Method::kLouvainOracle:
      return "louvain_oracle";
    case Method::kLinkLouvain:
      return "linklouvain";
    case Method::kLinkLouvainUW:
      return "linklouvain_uw";
    case Method::kHRLouvain:
      return "hrlouvain";
    case Method::kLinkLabel:
      return "linklabel";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

std::vector<Method> all_methods() {
  return {Method::kUserLevel,     Method::kGeoSynthetic,  Method::kLouvainOracle,
          Method::kLinkLouvain,   Method::kLinkLouvainUW, Method::kHRLouvain,
          Method::kLinkLabel};
}

bool needs_link_scores(Method m) {
  return m == Method::kLinkLouvain || m == Method::kLinkLouvainUW || m == Method::kLinkLabel;
}

GroupAssignment geo_synthetic_assignment(const SocialGraph& g, std::size_t regions,
                                         std::uint64_t seed, std::size_t groups,
                                         MergeMode mode) {
  if (regions < 2) throw std::invalid_argument("geo_synthetic: regions must be >= 2");
  if (regions > g.num_nodes()) throw std::invalid_argument("geo_synthetic: regions exceed nodes");
  const auto region = region_map(g.num_nodes(), regions);
  return merge_random(make_clustering(std::vector<std::uint64_t>(region.begin(), region.end())),
                      groups, seed, mode);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// Tags exceptions with the pipeline stage that raised them.
struct StageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(std::string(name) + ": " + e.what());
  }
}

struct SeedContext {
  GeneratedGraph gen;
  NodeGroups groups;
  std::optional<ScoredEdgeSet> scores;
  double score_seconds = 0.0;
  std::string score_error;
};

std::vector<GroupId> range_groups(std::size_t begin, std::size_t end) {
  std::vector<GroupId> out;
  for (std::size_t g = begin; g < end; ++g) out.push_back(static_cast<GroupId>(g));
  return out;
}

void run_method(const ComparisonSpec& spec, Method method, std::uint64_t seed,
                const SeedContext& ctx, ComparisonRow& row,
                const std::filesystem::path& method_dir) {
  const SocialGraph& g = ctx.gen.graph;
  const std::size_t n = g.num_nodes();
  const std::uint64_t assign_seed = derive_seed(seed, 7);
  ModularityParams lp = spec.louvain;
  lp.seed = derive_seed(seed, 8);

  if (needs_link_scores(method) && !ctx.scores) throw StageError(ctx.score_error);
  auto filtered = [&](WeightMode mode) {
    return stage("filter", [&] {
      return filter_by_score(g, *ctx.scores, FilterConfig{spec.gamma, mode, std::nullopt});
    });
  };

  std::optional<Clustering> clustering;
  GroupAssignment a;
  switch (method) {
    case Method::kUserLevel:
      a = stage("assign", [&] { return user_level_randomization(n, spec.groups, assign_seed); });
      break;
    case Method::kGeoSynthetic:
      a = stage("assign", [&] {
        return geo_synthetic_assignment(g, std::min(spec.graph.regions, g.num_nodes()), assign_seed, spec.groups,
                                        spec.merge);
      });
      break;
    case Method::kLouvainOracle:
      clustering = make_clustering(
          std::vector<std::uint64_t>(ctx.gen.block.begin(), ctx.gen.block.end()));
      break;
    case Method::kLinkLouvain: {
      const SocialGraph f = filtered(WeightMode::kScore);
      clustering = stage("cluster", [&] { return louvain(f, lp); });
      break;
    }
    case Method::kLinkLouvainUW: {
      const SocialGraph f = filtered(WeightMode::kUnit);
      clustering = stage("cluster", [&] { return louvain(f, lp); });
      break;
    }
    case Method::kHRLouvain: {
      const SocialGraph f = stage("filter", [&] { return remove_hotspots(g, spec.theta); });
      clustering = stage("cluster", [&] { return louvain(f, lp); });
      break;
    }
    case Method::kLinkLabel: {
      const SocialGraph f = filtered(WeightMode::kScore);
      clustering = stage("cluster", [&] { return label_propagation(f, lp.seed, spec.lp_max_iters); });
      break;
    }
  }
  if (clustering) {
    a = stage("assign", [&] { return merge_random(*clustering, spec.groups, assign_seed, spec.merge); });
  }
  row.clusters = a.num_clusters();

  const SimRun run = stage("simulate", [&] {
    return simulate_campaign(g, a.treated_flags(), spec.response, derive_seed(seed, 6),
                             ctx.groups);
  });
  stage("metrics", [&] {
    row.true_ate = run.true_ate;
    row.ate_hat = estimate_ate(a, range_groups(0, spec.groups / 2),
                               range_groups(spec.groups / 2, spec.groups), run.outcome);
    row.abs_bias = std::abs(row.ate_hat - row.true_ate);
    row.interference = interference(a, run.labels, spec.response.horizon);
    const double traffic = spec.variance_traffic * static_cast<double>(n);
    double total = 0.0;
    for (GroupId k = 0; k < spec.groups; ++k) {
      total += estimator_variance_at_traffic(cluster_stats(a, k, run.outcome.observed), traffic);
    }
    row.variance = total / static_cast<double>(spec.groups);
    return 0;
  });

  if (!method_dir.empty()) {
    std::filesystem::create_directories(method_dir);
    if (clustering) write_clustering(*clustering, g, (method_dir / "clustering.tsv").string());
    write_assignment(a, g, (method_dir / "assignment.tsv").string());
    write_label_graph(run.labels, g, (method_dir / "labels.tsv").string());
  }
}

}  // namespace

std::vector<ComparisonRow> run_comparison(const ComparisonSpec& spec,
                                          const std::vector<Method>& methods,
                                          const std::vector<std::uint64_t>& seeds) {
  if (methods.empty()) throw ConfigError("comparison needs at least one method");
  if (seeds.empty()) throw ConfigError("comparison needs at least one seed");
  validate(spec.graph);
  validate(spec.response);
  if (spec.groups < 2) throw ConfigError("assign.groups must be >= 2");
  if (spec.pilot_day < 1) throw ConfigError("linkpred.pilot_day must be >= 1");

  bool want_scores = false;
  for (Method m : methods) want_scores = want_scores || needs_link_scores(m);

  std::vector<ComparisonRow> rows;
  for (std::uint64_t seed : seeds) {
    const auto seed_start = Clock::now();
    SeedContext ctx;
    GraphGenSpec gs = spec.graph;
    gs.seed = derive_seed(seed, 1);
    ctx.gen = generate_graph(gs);
    ctx.groups = {ctx.gen.block, ctx.gen.region};
    const SocialGraph& g = ctx.gen.graph;
    const double graph_seconds = seconds_since(seed_start);

    std::filesystem::path seed_dir;
    if (!spec.run_dir.empty()) {
      seed_dir = std::filesystem::path(spec.run_dir) / ("seed_" + std::to_string(seed));
      std::filesystem::create_directories(seed_dir);
      write_edge_list(g, (seed_dir / "graph.tsv").string());
      write_features(g.feature_matrix(), (seed_dir / "features.csv").string());
    }

    if (want_scores) {
      const auto start = Clock::now();
      try {
        const GroupAssignment pilot_groups =
            stage("pilot", [&] { return user_level_randomization(g.num_nodes(), 2, derive_seed(seed, 2)); });
        ResponseModel pilot_response = spec.response;
        pilot_response.horizon = spec.pilot_day;
        const SimRun pilot = stage("pilot", [&] {
          return simulate_campaign(g, pilot_groups.treated_flags(), pilot_response,
                                   derive_seed(seed, 3), ctx.groups);
        });
        const TrainingSet ts = stage("train-lp", [&] {
          return make_training_set(g, pilot.labels.snapshot(spec.pilot_day), spec.train.neg_ratio,
                                   spec.train.max_positives, derive_seed(seed, 4));
        });
        const TrainResult trained =
            stage("train-lp", [&] { return train(ts, g, spec.train, derive_seed(seed, 5)); });
        ctx.scores = stage("score", [&] { return score_edges(trained.model, g); });
        if (!seed_dir.empty()) {
          trained.model.save((seed_dir / "model.json").string());
          write_scores(*ctx.scores, g, (seed_dir / "scores.tsv").string());
        }
      } catch (const StageError& e) {
        ctx.score_error = e.what();
      }
      ctx.score_seconds = seconds_since(start);
    }

    for (Method m : methods) {
      ComparisonRow row;
      row.method = m;
      row.seed = seed;
      const auto start = Clock::now();
      try {
        run_method(spec, m, seed, ctx, row,
                   seed_dir.empty() ? std::filesystem::path() : seed_dir / to_string(m));
      } catch (const std::exception& e) {
        row.error = e.what();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.interference = row.variance = row.ate_hat = row.true_ate = row.abs_bias = nan;
      }
      row.seconds = graph_seconds + seconds_since(start) +
                    (needs_link_scores(m) ? ctx.score_seconds : 0.0);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string csv_number(double x) { return std::isnan(x) ? "nan" : format_double(x); }

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

nlohmann::json json_number(double x) {
  return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x);
}

}  // namespace

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path,
                          bool include_timing) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "method,seed,clusters,interference,variance,ate_hat,true_ate,abs_bias";
  if (include_timing) out << ",seconds";
  out << ",error\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << r.seed << ',' << r.clusters << ','
        << csv_number(r.interference) << ',' << csv_number(r.variance) << ','
        << csv_number(r.ate_hat) << ',' << csv_number(r.true_ate) << ','
        << csv_number(r.abs_bias);
    if (include_timing) out << ',' << csv_number(r.seconds);
    out << ',' << csv_text(r.error) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

nlohmann::json to_json(const std::vector<ComparisonRow>& rows, bool include_timing) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"method", to_string(r.method)},
                        {"seed", r.seed},
                        {"clusters", r.clusters},
                        {"interference", json_number(r.interference)},
                        {"variance", json_number(r.variance)},
                        {"ate_hat", json_number(r.ate_hat)},
                        {"true_ate", json_number(r.true_ate)},
                        {"abs_bias", json_number(r.abs_bias)},
                        {"error", r.error}};
    if (include_timing) j["seconds"] = r.seconds;
    out.push_back(j);
  }
  return out;
}

}  // namespace linklouvain
