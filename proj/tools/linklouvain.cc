// linklouvain: one subcommand per pipeline stage.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 config error, 3 missing or
// malformed input, 4 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "linklouvain/assign.h"
#include "linklouvain/campaign.h"
#include "linklouvain/cluster.h"
#include "linklouvain/comparison.h"
#include "linklouvain/config.h"
#include "linklouvain/errors.h"
#include "linklouvain/filter.h"
#include "linklouvain/generate.h"
#include "linklouvain/graph_io.h"
#include "linklouvain/graph_stats.h"
#include "linklouvain/link_model.h"
#include "linklouvain/link_training.h"
#include "linklouvain/metrics.h"
#include "linklouvain/parallel.h"
#include "linklouvain/random.h"
#include "svg_plot.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace linklouvain {
namespace {

using tools::Plot;
using tools::render_svg;

// Shorthand flags; every RunConfig key is also available as --section.key.
const std::map<std::string, std::string> kAliases = {
    {"gamma", "filter.gamma"},        {"theta", "filter.theta"},
    {"weight-mode", "filter.weight_mode"}, {"groups", "assign.groups"},
    {"resolution", "cluster.resolution"}, {"method", "cluster.method"},
    {"hops", "linkpred.hops"},        {"width", "linkpred.width"},
    {"epochs", "linkpred.epochs"},    {"kind", "linkpred.kind"},
    {"nodes", "graph.n"},             {"day", "metrics.day"},
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::map<std::string, std::string> overrides;  // dotted key -> raw text
  std::map<std::string, std::string> paths;
};

void collect_leaves(const json& doc, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (const auto& item : doc.items()) {
    const std::string key = prefix.empty() ? item.key() : prefix + "." + item.key();
    if (item.value().is_object()) {
      collect_leaves(item.value(), key, out);
    } else {
      out.emplace_back(key, item.value());
    }
  }
}

json parse_value(const std::string& raw, const json& like) {
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  if (like.is_array() && !value.is_array()) {
    json arr = json::array();
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        arr.push_back(json::parse(item));
      } catch (const json::exception&) {
        arr.push_back(item);
      }
    }
    value = arr;
  }
  if (like.is_string() && !value.is_string()) value = raw;
  return value;
}

void set_dotted(json& doc, const std::string& key, json value) {
  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    if (!node->is_object()) *node = json::object();
    pos = dot + 1;
  }
}

RunConfig resolve(const Options& o, const std::string& stage, bool stochastic) {
  RunConfig c = default_config();
  if (!o.config.empty()) apply_config(c, load_config_document(o.config));
  const json defaults = to_json(default_config());
  std::vector<std::pair<std::string, json>> leaves;
  collect_leaves(defaults, "", leaves);
  std::map<std::string, json> like(leaves.begin(), leaves.end());
  json overlay = json::object();
  for (const auto& [key, raw] : o.overrides) {
    set_dotted(overlay, key, parse_value(raw, like.count(key) ? like[key] : json()));
  }
  if (o.seed) overlay["seed"] = *o.seed;
  if (o.threads) overlay["threads"] = *o.threads;
  apply_config(c, overlay);
  if (stochastic && !c.seed && !(stage == "compare" && !c.seeds.empty())) {
    throw ConfigError("stage '" + stage + "' is stochastic and needs --seed (or 'seed' in the config)");
  }
  set_thread_count(c.threads);
  return c;
}

const std::string& path_of(const Options& o, const std::string& name) {
  static const std::string empty;
  auto it = o.paths.find(name);
  return it == o.paths.end() ? empty : it->second;
}

std::string require_path(const Options& o, const std::string& name) {
  const std::string& p = path_of(o, name);
  if (p.empty()) throw ConfigError("--" + name + " is required");
  if (name == "out") {
    const fs::path parent = fs::path(p).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

// Prints the resolved config and stores it next to the output.
void echo_config(const RunConfig& c, const Options& o, const std::string& stage,
                 const std::string& echo_path) {
  json doc = to_json(c);
  json paths = json::object();
  for (const auto& [k, v] : o.paths) {
    if (!v.empty()) paths[k] = v;
  }
  doc["run"] = {{"command", stage}, {"paths", paths}};
  std::cout << doc.dump(2) << std::endl;
  if (!echo_path.empty()) write_json(echo_path, doc);
}

SocialGraph load_graph(const Options& o) {
  SocialGraph g = load_edge_list(require_path(o, "graph")).graph;
  const std::string& fpath = path_of(o, "features");
  if (!fpath.empty()) {
    FeatureMatrix f = load_features(fpath);
    if (f.rows != g.num_nodes()) {
      throw ParseError(fpath, f.rows, "feature rows (" + std::to_string(f.rows) +
                                          ") do not match graph nodes (" +
                                          std::to_string(g.num_nodes()) + ")");
    }
    g = g.with_features(std::move(f));
  }
  return g;
}

std::vector<GroupId> range_groups(GroupId lo, GroupId hi) {
  std::vector<GroupId> out(hi - lo);
  std::iota(out.begin(), out.end(), lo);
  return out;
}

// node<TAB>block<TAB>region, as written by `simulate`.
NodeGroups load_node_groups(const std::string& path, const SocialGraph& g) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open input file: " + path);
  NodeGroups groups;
  groups.block.assign(g.num_nodes(), 0);
  groups.region.assign(g.num_nodes(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    long long node = 0;
    std::uint32_t block = 0, region = 0;
    if (!(row >> node >> block >> region)) throw ParseError(path, line_no, "expected node<TAB>block<TAB>region");
    try {
      const NodeId v = g.dense_id(node);
      groups.block[v] = block;
      groups.region[v] = region;
    } catch (const std::out_of_range& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return groups;
}

void write_node_groups(const GeneratedGraph& gen, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "# node\tblock\tregion\n";
  for (NodeId v = 0; v < gen.graph.num_nodes(); ++v) {
    out << gen.graph.external_id(v) << '\t' << gen.block[v] << '\t' << gen.region[v] << '\n';
  }
}

// node<TAB>treated<TAB>observed<TAB>y0<TAB>y1
void write_outcomes(const ExperimentOutcome& o, const SocialGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "# node\ttreated\tobserved\ty0\ty1\n";
  for (NodeId v = 0; v < o.size(); ++v) {
    out << g.external_id(v) << '\t' << int(o.treated[v]) << '\t' << format_double(o.observed[v])
        << '\t' << format_double(o.y0[v]) << '\t' << format_double(o.y1[v]) << '\n';
  }
}

ExperimentOutcome load_outcomes(const std::string& path, const SocialGraph& g) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open input file: " + path);
  const std::size_t n = g.num_nodes();
  ExperimentOutcome o;
  o.treated.assign(n, 0);
  o.observed.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> y0(n), y1(n);
  bool counterfactuals = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    long long node = 0;
    int treated = 0;
    double obs = 0;
    if (!(row >> node >> treated >> obs)) {
      throw ParseError(path, line_no, "expected node<TAB>treated<TAB>observed[<TAB>y0<TAB>y1]");
    }
    double a = 0, b = 0;
    if (!(row >> a >> b)) counterfactuals = false;
    NodeId v = 0;
    try {
      v = g.dense_id(node);
    } catch (const std::out_of_range& e) {
      throw ParseError(path, line_no, e.what());
    }
    o.treated[v] = treated != 0;
    o.observed[v] = obs;
    y0[v] = a;
    y1[v] = b;
  }
  for (NodeId v = 0; v < n; ++v) {
    if (std::isnan(o.observed[v])) {
      throw ParseError(path, line_no, "node " + std::to_string(g.external_id(v)) + " has no outcome");
    }
  }
  if (counterfactuals) {
    o.y0 = std::move(y0);
    o.y1 = std::move(y1);
  }
  return o;
}

// ---- stages ----------------------------------------------------------------

int run_ingest(const Options& o) {
  const RunConfig c = resolve(o, "ingest", false);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "ingest", out + ".config.json");
  const EdgeListLoad load = load_edge_list(require_path(o, "edges"));
  SocialGraph g = load.graph;
  if (!path_of(o, "features").empty()) {
    FeatureMatrix f = load_features(path_of(o, "features"));
    if (f.rows != g.num_nodes()) {
      throw ParseError(path_of(o, "features"), f.rows, "feature rows do not match graph nodes");
    }
    g = g.with_features(std::move(f));
    if (!path_of(o, "features-out").empty()) write_features(g.feature_matrix(), path_of(o, "features-out"));
  }
  write_edge_list(g, out);
  json stats = {{"nodes", g.num_nodes()},
                {"edges", g.num_edges()},
                {"rows", load.rows},
                {"self_loops_dropped", load.self_loops_dropped},
                {"duplicates_collapsed", load.duplicates_collapsed},
                {"degree_distribution", to_json(degree_distribution(g, c.degree_buckets))}};
  write_json(out + ".stats.json", stats);
  return 0;
}

int run_simulate(const Options& o) {
  RunConfig c = resolve(o, "simulate", true);
  const fs::path dir = require_path(o, "out-dir");
  fs::create_directories(dir);
  echo_config(c, o, "simulate", (dir / "config.json").string());
  const std::uint64_t seed = *c.seed;

  SocialGraph g;
  NodeGroups groups;
  if (path_of(o, "graph").empty()) {
    GraphGenSpec spec = c.graph;
    spec.seed = derive_seed(seed, 1);
    GeneratedGraph gen = generate_graph(spec);
    write_edge_list(gen.graph, (dir / "graph.tsv").string());
    write_features(gen.graph.feature_matrix(), (dir / "features.csv").string());
    write_node_groups(gen, (dir / "nodes.tsv").string());
    groups.block = gen.block;
    groups.region = gen.region;
    g = std::move(gen.graph);
  } else {
    g = load_graph(o);
    if (!path_of(o, "node-groups").empty()) groups = load_node_groups(path_of(o, "node-groups"), g);
  }

  GroupAssignment a;
  if (path_of(o, "assignment").empty()) {
    a = user_level_randomization(g.num_nodes(), 2, derive_seed(seed, 2));
    write_assignment(a, g, (dir / "assignment.tsv").string());
  } else {
    std::optional<Clustering> clusters;
    if (!path_of(o, "clusters").empty()) clusters = load_clustering(path_of(o, "clusters"), g);
    a = load_assignment(path_of(o, "assignment"), g, clusters ? &*clusters : nullptr);
  }
  if (a.num_groups < 2) throw ConfigError("assign.groups: the assignment needs at least 2 groups");
  const SimRun run = simulate_campaign(g, a.treated_flags(), c.response, derive_seed(seed, 3), groups);
  write_label_graph(run.labels, g, (dir / "labels.tsv").string());
  write_outcomes(run.outcome, g, (dir / "outcomes.tsv").string());
  write_json((dir / "summary.json").string(), {{"nodes", g.num_nodes()},
                                               {"edges", g.num_edges()},
                                               {"label_edges", run.labels.num_edges()},
                                               {"participants", run.participants},
                                               {"true_ate", run.true_ate}});
  return 0;
}

int run_train(const Options& o) {
  RunConfig c = resolve(o, "train-lp", true);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "train-lp", out + ".config.json");
  const std::uint64_t seed = *c.seed;
  const SocialGraph g = load_graph(o);
  const LabelGraph full = load_label_graph(require_path(o, "labels"), g);
  const LabelGraph labels = full.snapshot(std::min(c.pilot_day, full.horizon()));
  const TrainingSet ts = make_training_set(g, labels, c.train.neg_ratio, c.train.max_positives,
                                           derive_seed(seed, 4));
  auto [fit, holdout] = split_pairs(ts.all(), c.holdout_fraction, derive_seed(seed, 6));
  TrainingSet fit_set;
  for (const auto& p : fit) (p.label > 0.5 ? fit_set.positives : fit_set.negatives).push_back(p);
  const TrainResult result = train(fit_set, g, c.train, derive_seed(seed, 5));
  result.model.save(out);
  json report = {{"training_pairs", fit.size()},
                 {"holdout_pairs", holdout.size()},
                 {"loss_trace", result.loss_trace}};
  if (!holdout.empty()) {
    std::vector<int> y;
    for (const auto& p : holdout) y.push_back(p.label > 0.5);
    bool both = std::count(y.begin(), y.end(), 1) > 0 && std::count(y.begin(), y.end(), 0) > 0;
    if (both) report["holdout"] = to_json(evaluate_classifier(score_pairs(result.model, g, holdout), y));
  }
  write_json(out + ".report.json", report);
  return 0;
}

int run_score(const Options& o) {
  const RunConfig c = resolve(o, "score", false);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "score", out + ".config.json");
  const SocialGraph g = load_graph(o);
  const LinkModel m = LinkModel::load(require_path(o, "model"));
  write_scores(score_edges(m, g), g, out);
  return 0;
}

int run_filter(const Options& o) {
  const RunConfig c = resolve(o, "filter", false);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "filter", out + ".config.json");
  const SocialGraph g = load_graph(o);
  const ScoredEdgeSet scores = load_scores(require_path(o, "scores"), g);
  const SocialGraph f = apply_filter(g, scores, c.filter);
  write_edge_list(f, out);
  write_json(out + ".stats.json", {{"nodes", f.num_nodes()},
                                   {"edges_before", g.num_edges()},
                                   {"edges_after", f.num_edges()},
                                   {"degree_before", to_json(degree_distribution(g, c.degree_buckets))},
                                   {"degree_after", to_json(degree_distribution(f, c.degree_buckets))}});
  return 0;
}

int run_cluster(const Options& o) {
  const RunConfig c = resolve(o, "cluster", true);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "cluster", out + ".config.json");
  const SocialGraph g = load_graph(o);
  Clustering cl;
  if (c.cluster_method == ClusterMethod::kLouvain) {
    ModularityParams p = c.louvain;
    p.seed = *c.seed;
    cl = louvain(g, p);
  } else {
    cl = label_propagation(g, *c.seed, c.lp_max_iters);
    if (g.total_weight() > 0.0) cl.modularity = modularity(g, cl.assignment);
  }
  write_clustering(cl, g, out);
  write_json(out + ".summary.json", clustering_summary(cl));
  return 0;
}

int run_assign(const Options& o) {
  const RunConfig c = resolve(o, "assign", true);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "assign", out + ".config.json");
  const SocialGraph g = load_graph(o);
  GroupAssignment a;
  if (path_of(o, "clusters").empty()) {
    a = user_level_randomization(g.num_nodes(), c.groups, *c.seed);
  } else {
    a = merge_random(load_clustering(path_of(o, "clusters"), g), c.groups, *c.seed, c.merge);
  }
  write_assignment(a, g, out);
  write_json(out + ".summary.json", assignment_summary(a));
  return 0;
}

int run_metrics(const Options& o) {
  RunConfig c = resolve(o, "metrics", false);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "metrics", out + ".config.json");
  const SocialGraph g = load_graph(o);
  std::optional<Clustering> clusters;
  if (!path_of(o, "clusters").empty()) clusters = load_clustering(path_of(o, "clusters"), g);
  const GroupAssignment a = load_assignment(require_path(o, "assignment"), g, clusters ? &*clusters : nullptr);
  if (a.num_groups < 2) throw ConfigError("assign.groups: metrics need at least 2 groups");
  ExperimentOutcome outcome = load_outcomes(require_path(o, "outcomes"), g);
  const GroupId half = static_cast<GroupId>(a.num_groups / 2);
  outcome.treated = a.treated_flags();

  MetricsReport r;
  if (outcome.has_counterfactuals()) r.true_ate = true_ate(outcome);
  r.ate_hat = estimate_ate(a, range_groups(0, half), range_groups(half, a.num_groups), outcome);
  if (!path_of(o, "labels").empty()) {
    const LabelGraph l = load_label_graph(path_of(o, "labels"), g);
    const int day = c.metrics_day < 0 ? l.horizon() : c.metrics_day;
    r.interference = interference(a, l, day);
  }
  for (GroupId k = 0; k < a.num_groups; ++k) {
    const ClusterStats cs = cluster_stats(a, k, outcome.observed);
    r.group_variance.push_back(cs.k >= 2 ? std::optional<double>(estimator_variance(cs)) : std::nullopt);
  }
  r.exposure = exposure_curve(g, outcome.treated, outcome.observed, c.exposure_bins);
  r.config = to_json(c);
  json doc = to_json(r);
  doc["graph"] = {{"nodes", g.num_nodes()}, {"edges", g.num_edges()}};
  doc["degree_distribution"] = to_json(degree_distribution(g, c.degree_buckets));
  doc["assignment"] = assignment_summary(a);
  write_json(out, doc);
  const fs::path csv = fs::path(out).replace_extension(".exposure.csv");
  write_exposure_csv(r.exposure, csv.string());
  return 0;
}

int run_compare(const Options& o) {
  const RunConfig c = resolve(o, "compare", true);
  const std::string out = require_path(o, "out");
  echo_config(c, o, "compare", out + ".config.json");
  const auto rows = run_comparison(comparison_spec(c), c.methods, comparison_seeds(c));
  write_comparison_csv(rows, out, c.include_timing);
  write_json(fs::path(out).replace_extension(".json").string(), to_json(rows, c.include_timing));
  bool any_error = false;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      std::cerr << "warning: " << to_string(row.method) << " seed " << row.seed << ": " << row.error << '\n';
      any_error = true;
    }
  }
  (void)any_error;
  return 0;
}

std::string fmt_opt(const json& v) {
  if (v.is_null()) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v.get<double>());
  return buf;
}

int run_report(const Options& o) {
  const RunConfig c = resolve(o, "report", false);
  const fs::path dir = require_path(o, "out-dir");
  fs::create_directories(dir);
  echo_config(c, o, "report", (dir / "config.json").string());
  const std::string mpath = require_path(o, "metrics");
  std::ifstream in(mpath);
  if (!in) throw MissingInputError("cannot open input file: " + mpath);
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(mpath, 1, e.what());
  }

  std::ostringstream table;
  table << "| metric | value |\n|---|---|\n";
  table << "| nodes | " << m.value("graph", json::object()).value("nodes", 0) << " |\n";
  table << "| edges | " << m.value("graph", json::object()).value("edges", 0) << " |\n";
  table << "| ate_hat | " << fmt_opt(m.value("ate_hat", json())) << " |\n";
  table << "| true_ate | " << fmt_opt(m.value("true_ate", json())) << " |\n";
  table << "| interference | " << fmt_opt(m.value("interference", json())) << " |\n";
  const json variances = m.value("group_variance", json::array());
  for (std::size_t k = 0; k < variances.size(); ++k) {
    table << "| variance group " << k << " | " << fmt_opt(variances[k]) << " |\n";
  }
  table << "\n| exposure low | exposure high | mean outcome | count |\n|---|---|---|---|\n";
  Plot exposure;
  exposure.title = "Exposure curve";
  exposure.x_label = "treated neighbor fraction";
  exposure.y_label = "mean outcome";
  exposure.connect = true;
  for (const auto& b : m.value("exposure_curve", json::object()).value("buckets", json::array())) {
    table << "| " << fmt_opt(b["bucket_low"]) << " | " << fmt_opt(b["bucket_high"]) << " | "
          << fmt_opt(b["mean_outcome"]) << " | " << b["count"].get<std::size_t>() << " |\n";
    if (!b["mean_outcome"].is_null()) {
      exposure.points.emplace_back(0.5 * (b["bucket_low"].get<double>() + b["bucket_high"].get<double>()),
                                   b["mean_outcome"].get<double>());
    }
  }
  Plot degree;
  degree.title = "Degree distribution";
  degree.x_label = "degree";
  degree.y_label = "nodes";
  degree.log_x = degree.log_y = true;
  const json dd = m.value("degree_distribution", json::object());
  if (dd.contains("bucket_edges")) {
    const auto edges = dd["bucket_edges"].get<std::vector<double>>();
    const auto counts = dd["counts"].get<std::vector<double>>();
    for (std::size_t i = 0; i < counts.size() && i + 1 < edges.size(); ++i) {
      degree.points.emplace_back(std::sqrt(std::max(edges[i], 0.5) * edges[i + 1]), counts[i]);
    }
  }
  write_text((dir / "report.md").string(), table.str());
  write_text((dir / "exposure_curve.svg").string(), render_svg(exposure));
  write_text((dir / "degree_distribution.svg").string(), render_svg(degree));
  std::cout << table.str();
  return 0;
}

}  // namespace
}  // namespace linklouvain

int main(int argc, char** argv) {
  using namespace linklouvain;
  CLI::App app{"Link-prediction filtered clustering for network experiment design"};
  app.require_subcommand(1);

  struct Stage {
    const char* name;
    const char* help;
    std::vector<std::pair<std::string, std::string>> paths;  // flag, help
    std::function<int(const Options&)> run;
  };
  const std::vector<Stage> stages = {
      {"ingest", "Normalize an edge list and report degree statistics",
       {{"edges", "input edge list"}, {"features", "node feature CSV"},
        {"features-out", "normalized feature CSV"}, {"out", "normalized edge list"}},
       run_ingest},
      {"train-lp", "Train the link scorer on a label-graph snapshot",
       {{"graph", "edge list"}, {"features", "node feature CSV"}, {"labels", "label graph"},
        {"out", "model JSON"}},
       run_train},
      {"score", "Score every edge of a graph",
       {{"graph", "edge list"}, {"features", "node feature CSV"}, {"model", "model JSON"},
        {"out", "scores TSV"}},
       run_score},
      {"filter", "Keep edges scoring at least gamma, then remove hotspots",
       {{"graph", "edge list"}, {"features", "node feature CSV"}, {"scores", "scores TSV"},
        {"out", "filtered edge list"}},
       run_filter},
      {"cluster", "Cluster a graph (louvain or label propagation)",
       {{"graph", "edge list"}, {"out", "clustering TSV"}}, run_cluster},
      {"assign", "Merge clusters into test groups (user-level without --clusters)",
       {{"graph", "edge list"}, {"clusters", "clustering TSV"}, {"out", "assignment TSV"}},
       run_assign},
      {"metrics", "ATE estimate, interference, variance and exposure curve",
       {{"graph", "edge list"}, {"clusters", "clustering TSV"}, {"assignment", "assignment TSV"},
        {"outcomes", "outcomes TSV"}, {"labels", "label graph"}, {"out", "metrics JSON"}},
       run_metrics},
      {"simulate", "Generate a graph (unless --graph) and simulate a campaign",
       {{"graph", "edge list"}, {"features", "node feature CSV"}, {"node-groups", "node block/region TSV"},
        {"assignment", "assignment TSV"}, {"clusters", "clustering TSV"}, {"out-dir", "output directory"}},
       run_simulate},
      {"compare", "Run the method comparison", {{"out", "comparison CSV"}}, run_compare},
      {"report", "Render a metrics JSON as a table and SVG plots",
       {{"metrics", "metrics JSON"}, {"out-dir", "output directory"}}, run_report},
  };

  std::vector<std::pair<std::string, json>> leaves;
  collect_leaves(to_json(default_config()), "", leaves);

  std::vector<Options> options(stages.size());
  std::vector<std::map<std::string, std::string>> raw(stages.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    CLI::App* sub = app.add_subcommand(stages[i].name, stages[i].help);
    Options& o = options[i];
    sub->add_option("--config", o.config, "config file (JSON or key = value) or bundled name");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    for (const auto& [flag, help] : stages[i].paths) {
      sub->add_option("--" + flag, o.paths[flag], help);
    }
    for (const auto& [key, value] : leaves) {
      if (key == "seed" || key == "threads") continue;
      sub->add_option("--" + key, raw[i][key], "config key " + key)->group("Config keys");
    }
    for (const auto& [alias, key] : kAliases) {
      sub->add_option("--" + alias, raw[i]["alias:" + alias], "same as --" + key)->group("Config keys");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    Options& o = options[i];
    for (const auto& [key, value] : raw[i]) {
      if (key.rfind("alias:", 0) == 0) {
        if (subs[i]->count("--" + key.substr(6))) o.overrides[kAliases.at(key.substr(6))] = value;
      } else if (subs[i]->count("--" + key)) {
        o.overrides[key] = value;
      }
    }
    try {
      return stages[i].run(o);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    } catch (const MissingInputError& e) {
      std::cerr << "missing input: " << e.what() << '\n';
      return 3;
    } catch (const ParseError& e) {
      std::cerr << "malformed input: " << e.what() << '\n';
      return 3;
    } catch (const NumericError& e) {
      std::cerr << "numeric failure: " << e.what() << '\n';
      return 4;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
