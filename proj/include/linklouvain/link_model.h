#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "linklouvain/enclosing_subgraph.h"
#include "linklouvain/graph.h"

namespace linklouvain {

// kNodeLabeling: towers over the enclosing subgraph with (d_A, d_B) role labels.
// kNoLabels: same towers without role labels.
// kFeatureOnly: towers that aggregate only the node itself (a plain MLP on
// endpoint features).
enum class ModelKind { kNodeLabeling, kNoLabels, kFeatureOnly };

std::string to_string(ModelKind kind);
// Accepts "nl-lp", "ng-lp", "feature-only". Throws ConfigError otherwise.
ModelKind parse_model_kind(const std::string& name);

struct LinkModelConfig {
  ModelKind kind = ModelKind::kNodeLabeling;
  int hops = 2;
  std::size_t width = 64;
  // Hidden width of the dense head; 0 gives a linear head.
  std::size_t head_hidden = 64;
  std::size_t feature_dim = 0;
  // Neighbor cap of the NeighborView used for extraction; 0 disables it.
  std::size_t fanout = 10;
  std::size_t max_nodes = 512;
  std::uint64_t view_seed = 0;
};

// Twin-tower message-passing link scorer.
//
// Layer k computes h_v = relu(W_k * mean(h_u : u in N(v) + {v}) + b_k); layer 1
// reads [features, role one-hot]. The head maps concat(h_A, h_B) through one
// relu layer to a logit; the logits of both concatenation orders are averaged
// before the logistic. Pairs are oriented with the smaller node id as A, since
// role labels are ordered.
//
// All parameters live in one flat vector. Weight matrices are stored
// column-major (width x input); to_json() emits them row-major.
class LinkModel {
 public:
  using Matrix = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrix = Eigen::Map<const Eigen::MatrixXd>;
  using Vector = Eigen::Map<Eigen::VectorXd>;
  using ConstVector = Eigen::Map<const Eigen::VectorXd>;

  // All-zero weights. Throws ConfigError on hops < 1, width 0 or max_nodes < 2.
  explicit LinkModel(const LinkModelConfig& config);
  // Uniform fan-in scaled initialization; biases zero.
  static LinkModel initialized(const LinkModelConfig& config, std::uint64_t seed);

  const LinkModelConfig& config() const { return config_; }
  ModelKind kind() const { return config_.kind; }
  int hops() const { return config_.hops; }
  std::size_t width() const { return config_.width; }
  std::size_t head_hidden() const { return config_.head_hidden; }
  std::size_t feature_dim() const { return config_.feature_dim; }
  // (K + 2)^2 for kNodeLabeling, else 0.
  std::size_t label_width() const;
  std::size_t input_width() const { return feature_dim() + label_width(); }
  std::size_t layer_input_width(int k) const;

  // k in [1, K].
  Matrix layer_weight(int k);
  ConstMatrix layer_weight(int k) const;
  Vector layer_bias(int k);
  ConstVector layer_bias(int k) const;
  // head_hidden x 2*width; empty for a linear head.
  Matrix head_weight();
  ConstMatrix head_weight() const;
  Vector head_bias();
  ConstVector head_bias() const;
  // Length head_hidden (or 2*width for a linear head).
  Vector output_weight();
  ConstVector output_weight() const;
  double& output_bias() { return params_[output_bias_offset_]; }
  double output_bias() const { return params_[output_bias_offset_]; }

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  std::size_t num_parameters() const { return params_.size(); }

  // Offsets into parameters(); used by the training code.
  std::size_t layer_weight_offset(int k) const { return layer_offsets_[k - 1]; }
  std::size_t layer_bias_offset(int k) const {
    return layer_offsets_[k - 1] + config_.width * layer_input_width(k);
  }
  std::size_t head_weight_offset() const { return head_offset_; }
  std::size_t head_bias_offset() const { return head_offset_ + head_hidden() * 2 * width(); }
  std::size_t output_weight_offset() const { return output_offset_; }
  std::size_t output_bias_offset() const { return output_bias_offset_; }

  nlohmann::json to_json() const;
  // Throws ConfigError on malformed documents.
  static LinkModel from_json(const nlohmann::json& doc);
  void save(const std::string& path) const;
  // Throws MissingInputError when the file is absent, ConfigError when malformed.
  static LinkModel load(const std::string& path);

 private:
  LinkModelConfig config_;
  std::vector<double> params_;
  std::vector<std::size_t> layer_offsets_;
  std::size_t head_offset_ = 0;
  std::size_t output_offset_ = 0;
  std::size_t output_bias_offset_ = 0;
};

double logistic(double x);

// Probability for the subgraph's targets (local nodes 0 and 1). `features`
// is indexed by global node id. Throws std::invalid_argument when the feature
// width differs from the model's or a node has no feature row.
double forward(const LinkModel& m, const EnclosingSubgraph& sg, const FeatureMatrix& features);

// Pre-logistic output of forward().
double forward_logit(const LinkModel& m, const EnclosingSubgraph& sg,
                     const FeatureMatrix& features);

// Scores node pairs of one graph. Builds the model's NeighborView and caches
// the feature projection of layer 1, so each call costs one extraction plus the
// towers' remaining work. score(a, b) equals forward() on the same subgraph
// bit for bit. Thread-safe; each calling thread gets its own scratch space.
class LinkScorer {
 public:
  // Throws std::invalid_argument when the graph's feature width does not
  // match the model.
  LinkScorer(const LinkModel& m, const SocialGraph& g);
  ~LinkScorer();
  LinkScorer(const LinkScorer&) = delete;
  LinkScorer& operator=(const LinkScorer&) = delete;

  double score(NodeId a, NodeId b) const;
  // The subgraph score(a, b) evaluates (pair already oriented).
  EnclosingSubgraph subgraph(NodeId a, NodeId b) const;
  const NeighborView& view() const { return view_; }

  struct Scratch;
  struct ScratchDeleter {
    void operator()(Scratch* s) const;
  };
  using ScratchPtr = std::unique_ptr<Scratch, ScratchDeleter>;
  ScratchPtr make_scratch() const;
  double score(NodeId a, NodeId b, Scratch& scratch) const;

 private:
  ScratchPtr acquire() const;
  void release(ScratchPtr s) const;

  const LinkModel* model_;
  const SocialGraph* graph_;
  NeighborView view_;
  std::vector<double> projection_;
  mutable std::mutex pool_mutex_;
  mutable std::vector<ScratchPtr> pool_;
};

// One probability per undirected edge, aligned with the graph's canonical
// edge order (u < v).
struct ScoredEdge {
  NodeId u = 0;
  NodeId v = 0;
  double score = 0.0;
};

struct ScoredEdgeSet {
  std::vector<ScoredEdge> edges;

  std::size_t size() const { return edges.size(); }
};

ScoredEdgeSet score_edges(const LinkModel& m, const SocialGraph& g);

// `src<TAB>dst<TAB>score` with external ids. Loading maps ids through `g`;
// rows may arrive in any order and orientation. Throws ParseError on
// malformed rows, unknown nodes or pairs that are not edges of g.
void write_scores(const ScoredEdgeSet& s, const SocialGraph& g, const std::string& path);
ScoredEdgeSet load_scores(const std::string& path, const SocialGraph& g);

}  // namespace linklouvain
