#include "linklouvain/config.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "linklouvain/errors.h"

namespace linklouvain {

namespace {

constexpr const char* kDemoConfig = R"({
  "seed": 7,
  "graph": {"model": "hybrid", "n": 4000, "m": 6, "block_size": 10, "p_in": 0.6,
            "p_out": 0.0, "regions": 40, "feature_dim": 8},
  "response": {"tau": 0.5, "interference": {"kind": "saturating", "c": 1.0, "s": 0.5},
               "region_effect": 1.0, "cross_block_affinity": 0.05},
  "linkpred": {"width": 16, "head_hidden": 16, "epochs": 2, "max_positives": 1500},
  "compare": {"num_seeds": 2, "include_timing": false}
}
)";

// Reads the keys of one JSON object section and rejects the rest.
class Section {
 public:
  Section(const nlohmann::json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj.is_object()) throw ConfigError("config section '" + prefix_ + "' must be an object");
  }

  bool has(const char* key) const { return obj_.contains(key); }

  template <typename T>
  void read(const char* key, T& out) {
    if (!obj_.contains(key)) return;
    used_.insert(key);
    try {
      out = obj_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + name(key) + "' has the wrong type");
    }
  }

  template <typename T, typename Parse>
  void read_enum(const char* key, T& out, Parse parse) {
    std::string text;
    if (!obj_.contains(key)) return;
    read(key, text);
    try {
      out = parse(text);
    } catch (const ConfigError& e) {
      throw ConfigError("config key '" + name(key) + "': " + e.what());
    }
  }

  const nlohmann::json& child(const char* key) {
    used_.insert(key);
    return obj_.at(key);
  }

  std::string name(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!used_.count(item.key())) throw ConfigError("unknown config key '" + name(item.key()) + "'");
    }
  }

 private:
  const nlohmann::json& obj_;
  std::string prefix_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "' " + what);
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.response.g = {InterferenceKind::kSaturating, 1.0, 0.5, 10.0};
  c.response.region_effect = 1.0;
  c.response.cross_block_affinity = 0.05;
  return c;
}

void apply_config(RunConfig& c, const nlohmann::json& doc) {
  Section top(doc, "");
  if (top.has("seed")) {
    std::uint64_t s = 0;
    top.read("seed", s);
    c.seed = s;
  }
  top.read("threads", c.threads);
  // Provenance block of a resolved-config echo; carries no settings.
  if (top.has("run")) top.child("run");

  if (top.has("graph")) {
    Section s(top.child("graph"), "graph");
    s.read_enum("model", c.graph.model, parse_graph_model);
    s.read("n", c.graph.n);
    s.read("m", c.graph.m);
    s.read("activity_exponent", c.graph.activity_exponent);
    s.read("activity_cap", c.graph.activity_cap);
    s.read("blocks", c.graph.blocks);
    s.read("block_size", c.graph.block_size);
    s.read("p_in", c.graph.p_in);
    s.read("p_out", c.graph.p_out);
    s.read("regions", c.graph.regions);
    s.read("feature_dim", c.graph.feature_dim);
    s.read("feature_signal", c.graph.feature_signal);
    s.read("degree_signal", c.graph.degree_signal);
    s.finish();
  }
  if (top.has("response")) {
    Section s(top.child("response"), "response");
    s.read("beta0", c.response.beta0);
    s.read("tau", c.response.tau);
    if (s.has("interference")) {
      Section g(s.child("interference"), "response.interference");
      g.read_enum("kind", c.response.g.kind, parse_interference_kind);
      g.read("c", c.response.g.c);
      g.read("s", c.response.g.s);
      g.read("k", c.response.g.k);
      g.finish();
    }
    s.read("noise", c.response.noise);
    s.read("region_effect", c.response.region_effect);
    s.read("p_treated", c.response.p_treated);
    s.read("p_control", c.response.p_control);
    s.read("horizon", c.response.horizon);
    s.read("initial_participation", c.response.initial_participation);
    s.read("cross_block_affinity", c.response.cross_block_affinity);
    s.finish();
  }
  if (top.has("linkpred")) {
    Section s(top.child("linkpred"), "linkpred");
    s.read_enum("kind", c.train.model.kind, parse_model_kind);
    s.read("hops", c.train.model.hops);
    s.read("width", c.train.model.width);
    s.read("head_hidden", c.train.model.head_hidden);
    s.read("fanout", c.train.model.fanout);
    s.read("max_nodes", c.train.model.max_nodes);
    s.read("view_seed", c.train.model.view_seed);
    s.read("epochs", c.train.epochs);
    s.read("batch_size", c.train.batch_size);
    s.read("step_size", c.train.step_size);
    s.read("beta1", c.train.beta1);
    s.read("beta2", c.train.beta2);
    s.read("epsilon", c.train.epsilon);
    s.read("neg_ratio", c.train.neg_ratio);
    s.read("max_positives", c.train.max_positives);
    s.read("pilot_day", c.pilot_day);
    s.read("holdout_fraction", c.holdout_fraction);
    s.finish();
  }
  if (top.has("filter")) {
    Section s(top.child("filter"), "filter");
    s.read("gamma", c.filter.gamma);
    s.read_enum("weight_mode", c.filter.weight_mode, parse_weight_mode);
    if (s.has("theta")) {
      const auto& t = s.child("theta");
      if (t.is_null()) {
        c.filter.theta.reset();
      } else {
        std::size_t theta = 0;
        s.read("theta", theta);
        c.filter.theta = theta;
      }
    }
    s.finish();
  }
  if (top.has("cluster")) {
    Section s(top.child("cluster"), "cluster");
    s.read_enum("method", c.cluster_method, [](const std::string& name) {
      if (name == "louvain") return ClusterMethod::kLouvain;
      if (name == "label_propagation") return ClusterMethod::kLabelPropagation;
      throw ConfigError("expected louvain or label_propagation, got '" + name + "'");
    });
    s.read("resolution", c.louvain.resolution);
    s.read("min_gain", c.louvain.min_gain);
    s.read("max_passes", c.louvain.max_passes);
    s.read("lp_max_iters", c.lp_max_iters);
    s.finish();
  }
  if (top.has("assign")) {
    Section s(top.child("assign"), "assign");
    s.read("groups", c.groups);
    s.read_enum("mode", c.merge, parse_merge_mode);
    s.finish();
  }
  if (top.has("metrics")) {
    Section s(top.child("metrics"), "metrics");
    s.read("exposure_bins", c.exposure_bins);
    s.read("variance_traffic", c.variance_traffic);
    s.read("day", c.metrics_day);
    s.read("degree_buckets", c.degree_buckets);
    s.finish();
  }
  if (top.has("compare")) {
    Section s(top.child("compare"), "compare");
    if (s.has("methods")) {
      std::vector<std::string> names;
      s.read("methods", names);
      c.methods.clear();
      for (const auto& name : names) {
        try {
          c.methods.push_back(parse_method(name));
        } catch (const ConfigError& e) {
          throw ConfigError("config key 'compare.methods': " + std::string(e.what()));
        }
      }
    }
    s.read("seeds", c.seeds);
    s.read("num_seeds", c.num_seeds);
    s.read("theta", c.hotspot_theta);
    s.read("include_timing", c.include_timing);
    s.read("run_dir", c.run_dir);
    s.finish();
  }
  top.finish();

  require(c.filter.gamma >= 0.0 && c.filter.gamma <= 1.0, "filter.gamma", "must lie in [0, 1]");
  require(!c.filter.theta || *c.filter.theta >= 1, "filter.theta", "must be >= 1");
  require(c.louvain.resolution > 0.0, "cluster.resolution", "must be > 0");
  require(c.louvain.min_gain > 0.0, "cluster.min_gain", "must be > 0");
  require(c.groups >= 1, "assign.groups", "must be >= 1");
  require(c.variance_traffic > 0.0 && c.variance_traffic <= 1.0, "metrics.variance_traffic",
          "must lie in (0, 1]");
  require(c.exposure_bins >= 2, "metrics.exposure_bins", "must be >= 2");
  require(c.degree_buckets >= 1, "metrics.degree_buckets", "must be >= 1");
  require(c.train.model.hops >= 1 && c.train.model.hops <= 8, "linkpred.hops", "must lie in [1, 8]");
  require(c.train.model.width >= 1, "linkpred.width", "must be >= 1");
  require(c.train.model.max_nodes >= 2, "linkpred.max_nodes", "must be >= 2");
  require(c.train.batch_size >= 1, "linkpred.batch_size", "must be >= 1");
  require(c.train.step_size > 0.0, "linkpred.step_size", "must be > 0");
  require(c.train.neg_ratio >= 0.0, "linkpred.neg_ratio", "must be >= 0");
  require(c.pilot_day >= 1, "linkpred.pilot_day", "must be >= 1");
  require(c.holdout_fraction >= 0.0 && c.holdout_fraction < 1.0, "linkpred.holdout_fraction",
          "must lie in [0, 1)");
  require(c.num_seeds >= 1, "compare.num_seeds", "must be >= 1");
  require(c.hotspot_theta >= 1, "compare.theta", "must be >= 1");
  validate(c.response);
}

nlohmann::json parse_config_text(const std::string& text, const std::string& origin) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(origin + ": " + e.what());
    }
  }
  nlohmann::json doc = nlohmann::json::object();
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string raw = strip(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
      value = raw;
    }
    nlohmann::json* node = &doc;
    std::size_t pos = 0;
    while (true) {
      const auto dot = key.find('.', pos);
      const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      node = &(*node)[part];
      if (!node->is_object()) *node = nlohmann::json::object();
      pos = dot + 1;
    }
  }
  return doc;
}

std::optional<std::string> builtin_config(const std::string& name) {
  if (name == "demo") return std::string(kDemoConfig);
  return std::nullopt;
}

nlohmann::json load_config_document(const std::string& path_or_name) {
  if (std::filesystem::exists(path_or_name)) {
    std::ifstream in(path_or_name);
    if (!in) throw MissingInputError("cannot open config file: " + path_or_name);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path_or_name);
  }
  if (auto text = builtin_config(path_or_name)) return parse_config_text(*text, path_or_name);
  throw MissingInputError("config file not found: " + path_or_name);
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  nlohmann::json doc = {
      {"threads", c.threads},
      {"graph",
       {{"model", to_string(c.graph.model)},
        {"n", c.graph.n},
        {"m", c.graph.m},
        {"activity_exponent", c.graph.activity_exponent},
        {"activity_cap", c.graph.activity_cap},
        {"blocks", c.graph.blocks},
        {"block_size", c.graph.block_size},
        {"p_in", c.graph.p_in},
        {"p_out", c.graph.p_out},
        {"regions", c.graph.regions},
        {"feature_dim", c.graph.feature_dim},
        {"feature_signal", c.graph.feature_signal},
        {"degree_signal", c.graph.degree_signal}}},
      {"response", to_json(c.response)},
      {"linkpred",
       {{"kind", to_string(c.train.model.kind)},
        {"hops", c.train.model.hops},
        {"width", c.train.model.width},
        {"head_hidden", c.train.model.head_hidden},
        {"fanout", c.train.model.fanout},
        {"max_nodes", c.train.model.max_nodes},
        {"view_seed", c.train.model.view_seed},
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"step_size", c.train.step_size},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"epsilon", c.train.epsilon},
        {"neg_ratio", c.train.neg_ratio},
        {"max_positives", c.train.max_positives},
        {"pilot_day", c.pilot_day},
        {"holdout_fraction", c.holdout_fraction}}},
      {"filter",
       {{"gamma", c.filter.gamma},
        {"weight_mode", to_string(c.filter.weight_mode)},
        {"theta", c.filter.theta ? nlohmann::json(*c.filter.theta) : nlohmann::json(nullptr)}}},
      {"cluster",
       {{"method", c.cluster_method == ClusterMethod::kLouvain ? "louvain" : "label_propagation"},
        {"resolution", c.louvain.resolution},
        {"min_gain", c.louvain.min_gain},
        {"max_passes", c.louvain.max_passes},
        {"lp_max_iters", c.lp_max_iters}}},
      {"assign",
       {{"groups", c.groups}, {"mode", to_string(c.merge)}}},
      {"metrics",
       {{"exposure_bins", c.exposure_bins},
        {"variance_traffic", c.variance_traffic},
        {"day", c.metrics_day},
        {"degree_buckets", c.degree_buckets}}},
      {"compare",
       {{"methods", methods},
        {"seeds", c.seeds},
        {"num_seeds", c.num_seeds},
        {"theta", c.hotspot_theta},
        {"include_timing", c.include_timing},
        {"run_dir", c.run_dir}}}};
  if (c.seed) doc["seed"] = *c.seed;
  return doc;
}

std::vector<std::uint64_t> comparison_seeds(const RunConfig& c) {
  if (!c.seeds.empty()) return c.seeds;
  const std::uint64_t base = c.seed.value_or(0);
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < c.num_seeds; ++i) out.push_back(base + i);
  return out;
}

ComparisonSpec comparison_spec(const RunConfig& c) {
  ComparisonSpec s;
  s.graph = c.graph;
  s.response = c.response;
  s.train = c.train;
  s.pilot_day = c.pilot_day;
  s.gamma = c.filter.gamma;
  s.theta = c.hotspot_theta;
  s.groups = c.groups;
  s.merge = c.merge;
  s.louvain = c.louvain;
  s.lp_max_iters = c.lp_max_iters;
  s.variance_traffic = c.variance_traffic;
  s.include_timing = c.include_timing;
  s.run_dir = c.run_dir;
  return s;
}

}  // namespace linklouvain
