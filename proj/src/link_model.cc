#include "linklouvain/link_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "link_forward.h"
#include "linklouvain/errors.h"
#include "linklouvain/graph_io.h"
#include "linklouvain/parallel.h"
#include "linklouvain/random.h"
#include "text_io.h"

namespace linklouvain {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kNodeLabeling:
      return "nl-lp";
    case ModelKind::kNoLabels:
      return "ng-lp";
    case ModelKind::kFeatureOnly:
      return "feature-only";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "nl-lp") return ModelKind::kNodeLabeling;
  if (name == "ng-lp") return ModelKind::kNoLabels;
  if (name == "feature-only") return ModelKind::kFeatureOnly;
  throw ConfigError("unknown model kind '" + name + "' (expected nl-lp, ng-lp, feature-only)");
}

LinkModel::LinkModel(const LinkModelConfig& config) : config_(config) {
  if (config.hops < 1 || config.hops > 8) throw ConfigError("model hops must be in [1, 8]");
  if (config.width == 0) throw ConfigError("model width must be >= 1");
  if (config.max_nodes < 2) throw ConfigError("model max_nodes must be >= 2");
  std::size_t offset = 0;
  for (int k = 1; k <= config.hops; ++k) {
    layer_offsets_.push_back(offset);
    offset += config.width * layer_input_width(k) + config.width;
  }
  head_offset_ = offset;
  offset += config.head_hidden * 2 * config.width + config.head_hidden;
  output_offset_ = offset;
  offset += config.head_hidden > 0 ? config.head_hidden : 2 * config.width;
  output_bias_offset_ = offset;
  params_.assign(offset + 1, 0.0);
}

LinkModel LinkModel::initialized(const LinkModelConfig& config, std::uint64_t seed) {
  LinkModel m(config);
  Rng rng(seed);
  auto fill = [&](std::size_t offset, std::size_t count, double limit) {
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = 0; i < count; ++i) m.params_[offset + i] = u(rng);
  };
  for (int k = 1; k <= config.hops; ++k) {
    const std::size_t fan_in = std::max<std::size_t>(m.layer_input_width(k), 1);
    fill(m.layer_weight_offset(k), config.width * m.layer_input_width(k),
         std::sqrt(6.0 / static_cast<double>(fan_in)));
  }
  if (config.head_hidden > 0) {
    fill(m.head_weight_offset(), config.head_hidden * 2 * config.width,
         std::sqrt(6.0 / static_cast<double>(2 * config.width)));
    fill(m.output_weight_offset(), config.head_hidden,
         std::sqrt(6.0 / static_cast<double>(config.head_hidden + 1)));
  } else {
    fill(m.output_weight_offset(), 2 * config.width,
         std::sqrt(6.0 / static_cast<double>(2 * config.width + 1)));
  }
  return m;
}

std::size_t LinkModel::label_width() const {
  if (config_.kind != ModelKind::kNodeLabeling) return 0;
  const auto side = static_cast<std::size_t>(config_.hops + 2);
  return side * side;
}

std::size_t LinkModel::layer_input_width(int k) const {
  if (k < 1 || k > config_.hops) throw std::out_of_range("layer index out of range");
  return k == 1 ? input_width() : config_.width;
}

LinkModel::Matrix LinkModel::layer_weight(int k) {
  return Matrix(params_.data() + layer_weight_offset(k), static_cast<Eigen::Index>(width()),
                static_cast<Eigen::Index>(layer_input_width(k)));
}
LinkModel::ConstMatrix LinkModel::layer_weight(int k) const {
  return ConstMatrix(params_.data() + layer_weight_offset(k), static_cast<Eigen::Index>(width()),
                     static_cast<Eigen::Index>(layer_input_width(k)));
}
LinkModel::Vector LinkModel::layer_bias(int k) {
  return Vector(params_.data() + layer_bias_offset(k), static_cast<Eigen::Index>(width()));
}
LinkModel::ConstVector LinkModel::layer_bias(int k) const {
  return ConstVector(params_.data() + layer_bias_offset(k), static_cast<Eigen::Index>(width()));
}
LinkModel::Matrix LinkModel::head_weight() {
  return Matrix(params_.data() + head_offset_, static_cast<Eigen::Index>(head_hidden()),
                static_cast<Eigen::Index>(head_hidden() > 0 ? 2 * width() : 0));
}
LinkModel::ConstMatrix LinkModel::head_weight() const {
  return ConstMatrix(params_.data() + head_offset_, static_cast<Eigen::Index>(head_hidden()),
                     static_cast<Eigen::Index>(head_hidden() > 0 ? 2 * width() : 0));
}
LinkModel::Vector LinkModel::head_bias() {
  return Vector(params_.data() + head_bias_offset(), static_cast<Eigen::Index>(head_hidden()));
}
LinkModel::ConstVector LinkModel::head_bias() const {
  return ConstVector(params_.data() + head_bias_offset(),
                     static_cast<Eigen::Index>(head_hidden()));
}
LinkModel::Vector LinkModel::output_weight() {
  return Vector(params_.data() + output_offset_,
                static_cast<Eigen::Index>(output_bias_offset_ - output_offset_));
}
LinkModel::ConstVector LinkModel::output_weight() const {
  return ConstVector(params_.data() + output_offset_,
                     static_cast<Eigen::Index>(output_bias_offset_ - output_offset_));
}

namespace {

constexpr const char* kModelFormat = "linklouvain-link-model";
constexpr int kModelVersion = 1;

nlohmann::json matrix_rows(const Eigen::Map<const Eigen::MatrixXd>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

void read_matrix(const nlohmann::json& rows, Eigen::Map<Eigen::MatrixXd> m, const char* what) {
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(m.rows())) {
    throw ConfigError(std::string("model: wrong row count for ") + what);
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(m.cols())) {
      throw ConfigError(std::string("model: wrong column count for ") + what);
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
}

void read_vector(const nlohmann::json& values, Eigen::Map<Eigen::VectorXd> v, const char* what) {
  if (!values.is_array() || values.size() != static_cast<std::size_t>(v.size())) {
    throw ConfigError(std::string("model: wrong length for ") + what);
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = values[static_cast<std::size_t>(i)].get<double>();
}

}  // namespace

nlohmann::json LinkModel::to_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (int k = 1; k <= hops(); ++k) {
    const auto b = layer_bias(k);
    layers.push_back({{"weight", matrix_rows(layer_weight(k))},
                      {"bias", std::vector<double>(b.data(), b.data() + b.size())}});
  }
  const auto hb = head_bias();
  const auto ow = output_weight();
  return {{"format", kModelFormat},
          {"version", kModelVersion},
          {"kind", to_string(kind())},
          {"hops", hops()},
          {"width", width()},
          {"head_hidden", head_hidden()},
          {"feature_dim", feature_dim()},
          {"fanout", config_.fanout},
          {"max_nodes", config_.max_nodes},
          {"view_seed", config_.view_seed},
          {"layers", layers},
          {"head",
           {{"weight", matrix_rows(head_weight())},
            {"bias", std::vector<double>(hb.data(), hb.data() + hb.size())}}},
          {"output",
           {{"weight", std::vector<double>(ow.data(), ow.data() + ow.size())},
            {"bias", output_bias()}}}};
}

LinkModel LinkModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", std::string()) != kModelFormat) {
      throw ConfigError("not a link model document");
    }
    if (doc.at("version").get<int>() != kModelVersion) {
      throw ConfigError("unsupported link model version " + doc.at("version").dump());
    }
    LinkModelConfig cfg;
    cfg.kind = parse_model_kind(doc.at("kind").get<std::string>());
    cfg.hops = doc.at("hops").get<int>();
    cfg.width = doc.at("width").get<std::size_t>();
    cfg.head_hidden = doc.at("head_hidden").get<std::size_t>();
    cfg.feature_dim = doc.at("feature_dim").get<std::size_t>();
    cfg.fanout = doc.at("fanout").get<std::size_t>();
    cfg.max_nodes = doc.at("max_nodes").get<std::size_t>();
    cfg.view_seed = doc.at("view_seed").get<std::uint64_t>();
    LinkModel m(cfg);
    const auto& layers = doc.at("layers");
    if (!layers.is_array() || layers.size() != static_cast<std::size_t>(cfg.hops)) {
      throw ConfigError("model: layer count does not match hops");
    }
    for (int k = 1; k <= cfg.hops; ++k) {
      const auto& layer = layers[static_cast<std::size_t>(k - 1)];
      read_matrix(layer.at("weight"), m.layer_weight(k), "layer weight");
      read_vector(layer.at("bias"), m.layer_bias(k), "layer bias");
    }
    if (cfg.head_hidden > 0) read_matrix(doc.at("head").at("weight"), m.head_weight(), "head weight");
    read_vector(doc.at("head").at("bias"), m.head_bias(), "head bias");
    read_vector(doc.at("output").at("weight"), m.output_weight(), "output weight");
    m.output_bias() = doc.at("output").at("bias").get<double>();
    for (double p : m.params_) {
      if (!std::isfinite(p)) throw ConfigError("model: non-finite parameter");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed link model: ") + e.what());
  }
}

void LinkModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << to_json().dump() << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

LinkModel LinkModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open input file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return from_json(doc);
}

double logistic(double x) {
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  // Keep the output strictly inside (0, 1).
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0 - 0x1p-53);
}

namespace detail {

__attribute__((noinline)) void project_features(const LinkModel& m, const double* mx,
                                                double* out) {
  const std::size_t w = m.width();
  const std::size_t d = m.feature_dim();
  const double* weights = m.parameters().data() + m.layer_weight_offset(1);
  std::fill(out, out + w, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const double xj = mx[j];
    if (xj == 0.0) continue;
    const double* col = weights + j * w;
    for (std::size_t r = 0; r < w; ++r) out[r] += col[r] * xj;
  }
}

std::vector<double> projection_cache(const LinkModel& m, const NeighborView& view,
                                     const FeatureMatrix& x) {
  const std::size_t n = view.num_nodes();
  const std::size_t w = m.width();
  const std::size_t d = m.feature_dim();
  const bool self_only = m.kind() == ModelKind::kFeatureOnly;
  std::vector<double> cache(n * w);
  parallel_for_chunks(n, [&](unsigned, std::size_t begin, std::size_t end) {
    std::vector<double> mx(d);
    for (std::size_t v = begin; v < end; ++v) {
      const auto own = x.row(v);
      std::copy(own.begin(), own.end(), mx.begin());
      double count = 1.0;
      if (!self_only) {
        for (NodeId u : view.out(static_cast<NodeId>(v))) {
          const auto row = x.row(u);
          for (std::size_t j = 0; j < d; ++j) mx[j] += row[j];
        }
        count += static_cast<double>(view.out(static_cast<NodeId>(v)).size());
      }
      for (std::size_t j = 0; j < d; ++j) mx[j] /= count;
      project_features(m, mx.data(), cache.data() + v * w);
    }
  });
  return cache;
}

namespace {

// out += W[:, first .. first + len) * in, W column-major with `rows` rows.
inline void accumulate_columns(const double* weights, std::size_t rows, const double* in,
                               std::size_t len, double* out) {
  for (std::size_t j = 0; j < len; ++j) {
    const double xj = in[j];
    if (xj == 0.0) continue;
    const double* col = weights + j * rows;
    for (std::size_t r = 0; r < rows; ++r) out[r] += col[r] * xj;
  }
}

inline double dot(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double TowerPass::run(const LinkModel& m, const EnclosingSubgraph& sg, const FeatureMatrix& x,
                      const std::vector<double>* cache, const NeighborView* view) {
  const int K = m.hops();
  const std::size_t w = m.width();
  const std::size_t d = m.feature_dim();
  const std::size_t L = m.label_width();
  const std::size_t n = sg.size();
  const bool self_only = m.kind() == ModelKind::kFeatureOnly;
  if (n < 2) throw std::invalid_argument("forward: subgraph needs both targets");
  if (x.dim != d) {
    throw std::invalid_argument("forward: feature width " + std::to_string(x.dim) +
                                " does not match model input width " + std::to_string(d));
  }
  if (d > 0) {
    for (NodeId v : sg.nodes) {
      if (v >= x.rows) throw std::invalid_argument("forward: node has no feature row");
    }
  }
  if (L > 0 && sg.hops != K) {
    throw std::invalid_argument("forward: subgraph hop count differs from model");
  }
  sg_ = &sg;
  width_ = w;
  hops_ = K;

  // Hop distance from the targets inside the local graph, explored only as
  // far as the towers read.
  constexpr int kFar = std::numeric_limits<int>::max();
  local_dist_.assign(n, kFar);
  queue_.clear();
  local_dist_[0] = 0;
  local_dist_[1] = 0;
  queue_.push_back(0);
  queue_.push_back(1);
  if (!self_only) {
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const std::uint32_t v = queue_[head];
      if (local_dist_[v] >= K - 1) continue;
      for (std::uint32_t u : sg.neighbors(v)) {
        if (local_dist_[u] != kFar) continue;
        local_dist_[u] = local_dist_[v] + 1;
        queue_.push_back(u);
      }
    }
  }
  level_nodes_.resize(static_cast<std::size_t>(K));
  row_of_.resize(static_cast<std::size_t>(K));
  pre_.resize(static_cast<std::size_t>(K));
  act_.resize(static_cast<std::size_t>(K));
  agg_.resize(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    auto& nodes = level_nodes_[k - 1];
    auto& rows = row_of_[k - 1];
    nodes.clear();
    rows.assign(n, -1);
    for (std::uint32_t v : queue_) {
      if (self_only ? v < 2 : local_dist_[v] <= K - k) {
        rows[v] = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(v);
      }
    }
  }

  if (L > 0) {
    labels_.resize(n);
    const int cap = K + 1;
    for (std::size_t v = 0; v < n; ++v) {
      const int da = std::min<int>(sg.dist_a[v], cap);
      const int db = std::min<int>(sg.dist_b[v], cap);
      labels_[v] = static_cast<std::uint8_t>(da * (K + 2) + db);
    }
  }

  const double* params = m.parameters().data();
  // Layer 1.
  {
    const auto& nodes = level_nodes_[0];
    const std::size_t rows = nodes.size();
    agg_[0].assign(rows * d, 0.0);
    label_frac_.assign(rows * L, 0.0);
    pre_[0].resize(rows * w);
    act_[0].resize(rows * w);
    const double* w1 = params + m.layer_weight_offset(1);
    const double* b1 = params + m.layer_bias_offset(1);
    counts_.resize(L);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::uint32_t v = nodes[i];
      const std::span<const std::uint32_t> nbrs =
          self_only ? std::span<const std::uint32_t>() : sg.neighbors(v);
      const double count = 1.0 + static_cast<double>(nbrs.size());
      const NodeId gv = sg.nodes[v];
      double* pre = pre_[0].data() + i * w;
      const bool cached = cache != nullptr &&
                          (self_only || (view != nullptr && nbrs.size() == view->out(gv).size()));
      if (cached) {
        std::copy(cache->data() + static_cast<std::size_t>(gv) * w,
                  cache->data() + static_cast<std::size_t>(gv) * w + w, pre);
      } else {
        double* mx = agg_[0].data() + i * d;
        if (d > 0) {
          const auto own = x.row(gv);
          std::copy(own.begin(), own.end(), mx);
          for (std::uint32_t u : nbrs) {
            const auto row = x.row(sg.nodes[u]);
            for (std::size_t j = 0; j < d; ++j) mx[j] += row[j];
          }
          for (std::size_t j = 0; j < d; ++j) mx[j] /= count;
        }
        project_features(m, mx, pre);
      }
      if (L > 0) {
        std::fill(counts_.begin(), counts_.end(), 0.0);
        counts_[labels_[v]] += 1.0;
        for (std::uint32_t u : nbrs) counts_[labels_[u]] += 1.0;
        double* frac = label_frac_.data() + i * L;
        for (std::size_t c = 0; c < L; ++c) {
          if (counts_[c] == 0.0) continue;
          frac[c] = counts_[c] / count;
          const double* col = w1 + (d + c) * w;
          for (std::size_t r = 0; r < w; ++r) pre[r] += col[r] * frac[c];
        }
      }
      double* act = act_[0].data() + i * w;
      for (std::size_t r = 0; r < w; ++r) {
        pre[r] += b1[r];
        act[r] = pre[r] > 0.0 ? pre[r] : 0.0;
      }
    }
  }

  // Layers 2..K.
  for (int k = 2; k <= K; ++k) {
    const auto& nodes = level_nodes_[k - 1];
    const auto& prev_rows = row_of_[k - 2];
    const std::vector<double>& prev = act_[k - 2];
    const std::size_t rows = nodes.size();
    agg_[k - 1].resize(rows * w);
    pre_[k - 1].resize(rows * w);
    act_[k - 1].resize(rows * w);
    const double* wk = params + m.layer_weight_offset(k);
    const double* bk = params + m.layer_bias_offset(k);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::uint32_t v = nodes[i];
      const std::span<const std::uint32_t> nbrs =
          self_only ? std::span<const std::uint32_t>() : sg.neighbors(v);
      const double count = 1.0 + static_cast<double>(nbrs.size());
      double* mean = agg_[k - 1].data() + i * w;
      const double* own = prev.data() + static_cast<std::size_t>(prev_rows[v]) * w;
      std::copy(own, own + w, mean);
      for (std::uint32_t u : nbrs) {
        const double* row = prev.data() + static_cast<std::size_t>(prev_rows[u]) * w;
        for (std::size_t r = 0; r < w; ++r) mean[r] += row[r];
      }
      for (std::size_t r = 0; r < w; ++r) mean[r] /= count;
      double* pre = pre_[k - 1].data() + i * w;
      std::fill(pre, pre + w, 0.0);
      accumulate_columns(wk, w, mean, w, pre);
      double* act = act_[k - 1].data() + i * w;
      for (std::size_t r = 0; r < w; ++r) {
        pre[r] += bk[r];
        act[r] = pre[r] > 0.0 ? pre[r] : 0.0;
      }
    }
  }

  // Head. Rows 0 and 1 of the last level are the targets.
  const double* ha = act_[K - 1].data();
  const double* hb = act_[K - 1].data() + w;
  concat_ab_.resize(2 * w);
  concat_ba_.resize(2 * w);
  std::copy(ha, ha + w, concat_ab_.begin());
  std::copy(hb, hb + w, concat_ab_.begin() + static_cast<std::ptrdiff_t>(w));
  std::copy(hb, hb + w, concat_ba_.begin());
  std::copy(ha, ha + w, concat_ba_.begin() + static_cast<std::ptrdiff_t>(w));
  const std::size_t hh = m.head_hidden();
  const double* wo = params + m.output_weight_offset();
  const double bo = m.output_bias();
  double out_ab, out_ba;
  if (hh > 0) {
    const double* wh = params + m.head_weight_offset();
    const double* bh = params + m.head_bias_offset();
    auto head = [&](const std::vector<double>& in, std::vector<double>& pre,
                    std::vector<double>& act) {
      pre.assign(hh, 0.0);
      act.resize(hh);
      accumulate_columns(wh, hh, in.data(), 2 * w, pre.data());
      for (std::size_t r = 0; r < hh; ++r) {
        pre[r] += bh[r];
        act[r] = pre[r] > 0.0 ? pre[r] : 0.0;
      }
      return dot(wo, act.data(), hh) + bo;
    };
    out_ab = head(concat_ab_, head_pre_ab_, head_act_ab_);
    out_ba = head(concat_ba_, head_pre_ba_, head_act_ba_);
  } else {
    out_ab = dot(wo, concat_ab_.data(), 2 * w) + bo;
    out_ba = dot(wo, concat_ba_.data(), 2 * w) + bo;
  }
  return 0.5 * (out_ab + out_ba);
}

void TowerPass::backward(const LinkModel& m, double dlogit, std::vector<double>& grad) {
  const int K = hops_;
  const std::size_t w = width_;
  const std::size_t d = m.feature_dim();
  const std::size_t L = m.label_width();
  const std::size_t hh = m.head_hidden();
  const bool self_only = m.kind() == ModelKind::kFeatureOnly;
  const EnclosingSubgraph& sg = *sg_;
  const double* params = m.parameters().data();
  const double half = 0.5 * dlogit;

  // Head.
  grad_concat_.assign(4 * w, 0.0);  // [d concat_ab | d concat_ba]
  const std::size_t wo_off = m.output_weight_offset();
  grad[m.output_bias_offset()] += dlogit;
  if (hh > 0) {
    const double* wh = params + m.head_weight_offset();
    const double* wo = params + wo_off;
    const std::size_t wh_off = m.head_weight_offset();
    const std::size_t bh_off = m.head_bias_offset();
    auto head_back = [&](const std::vector<double>& in, const std::vector<double>& pre,
                         const std::vector<double>& act, double* g_in) {
      grad_pre_.assign(hh, 0.0);
      for (std::size_t r = 0; r < hh; ++r) {
        grad[wo_off + r] += half * act[r];
        grad_pre_[r] = pre[r] > 0.0 ? half * wo[r] : 0.0;
        grad[bh_off + r] += grad_pre_[r];
      }
      for (std::size_t j = 0; j < 2 * w; ++j) {
        const double* col = wh + j * hh;
        double* gcol = grad.data() + wh_off + j * hh;
        double s = 0.0;
        for (std::size_t r = 0; r < hh; ++r) {
          gcol[r] += grad_pre_[r] * in[j];
          s += col[r] * grad_pre_[r];
        }
        g_in[j] = s;
      }
    };
    head_back(concat_ab_, head_pre_ab_, head_act_ab_, grad_concat_.data());
    head_back(concat_ba_, head_pre_ba_, head_act_ba_, grad_concat_.data() + 2 * w);
  } else {
    const double* wo = params + wo_off;
    for (std::size_t j = 0; j < 2 * w; ++j) {
      grad[wo_off + j] += half * (concat_ab_[j] + concat_ba_[j]);
      grad_concat_[j] = half * wo[j];
      grad_concat_[2 * w + j] = half * wo[j];
    }
  }

  // Targets' final embeddings.
  grad_act_.assign(level_nodes_[K - 1].size() * w, 0.0);
  for (std::size_t r = 0; r < w; ++r) {
    grad_act_[r] = grad_concat_[r] + grad_concat_[3 * w + r];
    grad_act_[w + r] = grad_concat_[w + r] + grad_concat_[2 * w + r];
  }

  for (int k = K; k >= 1; --k) {
    const auto& nodes = level_nodes_[k - 1];
    const std::size_t rows = nodes.size();
    const std::size_t in_width = k == 1 ? d : w;
    const std::size_t w_off = m.layer_weight_offset(k);
    const std::size_t b_off = m.layer_bias_offset(k);
    const double* wk = params + w_off;
    const std::vector<double>& pre = pre_[k - 1];
    const std::vector<double>& inputs = agg_[k - 1];
    grad_pre_.resize(rows * w);
    for (std::size_t i = 0; i < rows * w; ++i) grad_pre_[i] = pre[i] > 0.0 ? grad_act_[i] : 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double* gp = grad_pre_.data() + i * w;
      for (std::size_t r = 0; r < w; ++r) grad[b_off + r] += gp[r];
      const double* in = inputs.data() + i * in_width;
      for (std::size_t j = 0; j < in_width; ++j) {
        if (in[j] == 0.0) continue;
        double* gcol = grad.data() + w_off + j * w;
        for (std::size_t r = 0; r < w; ++r) gcol[r] += gp[r] * in[j];
      }
      if (k == 1 && L > 0) {
        const double* frac = label_frac_.data() + i * L;
        for (std::size_t c = 0; c < L; ++c) {
          if (frac[c] == 0.0) continue;
          double* gcol = grad.data() + w_off + (d + c) * w;
          for (std::size_t r = 0; r < w; ++r) gcol[r] += gp[r] * frac[c];
        }
      }
    }
    if (k == 1) break;
    const auto& prev_rows = row_of_[k - 2];
    grad_prev_.assign(level_nodes_[k - 2].size() * w, 0.0);
    std::vector<double> g_mean(w);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::uint32_t v = nodes[i];
      const double* gp = grad_pre_.data() + i * w;
      for (std::size_t j = 0; j < w; ++j) g_mean[j] = dot(wk + j * w, gp, w);
      const std::span<const std::uint32_t> nbrs =
          self_only ? std::span<const std::uint32_t>() : sg.neighbors(v);
      const double inv = 1.0 / (1.0 + static_cast<double>(nbrs.size()));
      double* own = grad_prev_.data() + static_cast<std::size_t>(prev_rows[v]) * w;
      for (std::size_t j = 0; j < w; ++j) own[j] += g_mean[j] * inv;
      for (std::uint32_t u : nbrs) {
        double* row = grad_prev_.data() + static_cast<std::size_t>(prev_rows[u]) * w;
        for (std::size_t j = 0; j < w; ++j) row[j] += g_mean[j] * inv;
      }
    }
    grad_act_.swap(grad_prev_);
  }
}

}  // namespace detail

double forward_logit(const LinkModel& m, const EnclosingSubgraph& sg,
                     const FeatureMatrix& features) {
  detail::TowerPass pass;
  return pass.run(m, sg, features);
}

double forward(const LinkModel& m, const EnclosingSubgraph& sg, const FeatureMatrix& features) {
  return logistic(forward_logit(m, sg, features));
}

struct LinkScorer::Scratch {
  explicit Scratch(const NeighborView& view) : extractor(view) {}
  SubgraphExtractor extractor;
  EnclosingSubgraph sg;
  detail::TowerPass pass;
};

LinkScorer::LinkScorer(const LinkModel& m, const SocialGraph& g)
    : model_(&m), graph_(&g), view_(g, m.config().fanout, m.config().view_seed) {
  if (g.feature_dim() != m.feature_dim()) {
    throw std::invalid_argument("graph feature width " + std::to_string(g.feature_dim()) +
                                " does not match model feature width " +
                                std::to_string(m.feature_dim()));
  }
  projection_ = detail::projection_cache(m, view_, g.feature_matrix());
}

LinkScorer::~LinkScorer() = default;

void LinkScorer::ScratchDeleter::operator()(Scratch* s) const { delete s; }

LinkScorer::ScratchPtr LinkScorer::make_scratch() const { return ScratchPtr(new Scratch(view_)); }

LinkScorer::ScratchPtr LinkScorer::acquire() const {
  {
    std::lock_guard<std::mutex> lock(pool_mutex_);
    if (!pool_.empty()) {
      auto s = std::move(pool_.back());
      pool_.pop_back();
      return s;
    }
  }
  return make_scratch();
}

void LinkScorer::release(ScratchPtr s) const {
  std::lock_guard<std::mutex> lock(pool_mutex_);
  pool_.push_back(std::move(s));
}

namespace {

int extraction_hops(const LinkModel& m) {
  return m.kind() == ModelKind::kFeatureOnly ? 0 : m.hops();
}

}  // namespace

double LinkScorer::score(NodeId a, NodeId b, Scratch& s) const {
  if (a > b) std::swap(a, b);
  s.extractor.extract(a, b, extraction_hops(*model_), model_->config().max_nodes,
                      model_->config().view_seed, s.sg, /*full_adjacency=*/false);
  return logistic(s.pass.run(*model_, s.sg, graph_->feature_matrix(), &projection_, &view_));
}

double LinkScorer::score(NodeId a, NodeId b) const {
  auto s = acquire();
  const double p = score(a, b, *s);
  release(std::move(s));
  return p;
}

EnclosingSubgraph LinkScorer::subgraph(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  SubgraphExtractor ex(view_);
  EnclosingSubgraph sg;
  ex.extract(a, b, extraction_hops(*model_), model_->config().max_nodes,
             model_->config().view_seed, sg);
  return sg;
}

ScoredEdgeSet score_edges(const LinkModel& m, const SocialGraph& g) {
  const LinkScorer scorer(m, g);
  ScoredEdgeSet out;
  out.edges.resize(g.num_edges());
  const auto& offsets = g.upper_offsets();
  parallel_for_chunks(g.num_nodes(), [&](unsigned, std::size_t begin, std::size_t end) {
    auto scratch = scorer.make_scratch();
    for (std::size_t u = begin; u < end; ++u) {
      const auto nbrs = g.neighbors(static_cast<NodeId>(u));
      std::size_t slot = offsets[u];
      for (std::size_t i = g.upper_begin(static_cast<NodeId>(u)); i < nbrs.size(); ++i) {
        const NodeId v = nbrs[i];
        out.edges[slot++] = {static_cast<NodeId>(u), v,
                             scorer.score(static_cast<NodeId>(u), v, *scratch)};
      }
    }
  });
  return out;
}

void write_scores(const ScoredEdgeSet& s, const SocialGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (const auto& e : s.edges) {
    out << g.external_id(e.u) << '\t' << g.external_id(e.v) << '\t' << format_double(e.score)
        << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

ScoredEdgeSet load_scores(const std::string& path, const SocialGraph& g) {
  using namespace detail;
  std::ifstream in = open_input(path);
  ScoredEdgeSet s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split_fields(view, '\t');
    if (fields.size() != 3) throw ParseError(path, line_no, "expected src<TAB>dst<TAB>score");
    const ExternalId a = require_int(path, line_no, fields[0], "source id");
    const ExternalId b = require_int(path, line_no, fields[1], "destination id");
    double score = 0.0;
    if (!parse_double(fields[2], score) || !std::isfinite(score)) {
      throw ParseError(path, line_no, "invalid score '" + std::string(fields[2]) + "'");
    }
    NodeId u, v;
    try {
      u = g.dense_id(a);
      v = g.dense_id(b);
    } catch (const std::out_of_range& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (u > v) std::swap(u, v);
    if (!g.has_edge(u, v)) {
      throw ParseError(path, line_no,
                       "pair " + std::to_string(a) + "-" + std::to_string(b) + " is not an edge");
    }
    s.edges.push_back({u, v, score});
  }
  return s;
}

}  // namespace linklouvain
