#include "linklouvain/link_training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "link_forward.h"
#include "linklouvain/errors.h"
#include "linklouvain/parallel.h"
#include "linklouvain/random.h"

namespace linklouvain {

std::vector<LabeledPair> TrainingSet::all() const {
  std::vector<LabeledPair> out(positives);
  out.insert(out.end(), negatives.begin(), negatives.end());
  return out;
}

namespace {

template <typename T>
void sample_without_replacement(std::vector<T>& items, std::size_t keep, Rng& rng) {
  if (keep >= items.size()) return;
  for (std::size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
    std::swap(items[i], items[pick(rng)]);
  }
  items.resize(keep);
}

}  // namespace

TrainingSet make_training_set(const SocialGraph& g, const LabelGraph& labels, double neg_ratio,
                              std::size_t max_positives, std::uint64_t seed) {
  if (!(neg_ratio >= 0.0) || !std::isfinite(neg_ratio)) {
    throw std::invalid_argument("negative ratio must be finite and >= 0");
  }
  if (labels.num_nodes() != g.num_nodes()) {
    throw std::invalid_argument("label graph node count does not match social graph");
  }
  // Label edges are sorted canonically, as is for_each_edge, so one merge pass
  // splits the G-edges.
  TrainingSet ts;
  const auto& le = labels.edges();
  std::size_t cursor = 0;
  g.for_each_edge([&](NodeId u, NodeId v, double) {
    while (cursor < le.size() && (le[cursor].u < u || (le[cursor].u == u && le[cursor].v < v))) {
      ++cursor;
    }
    const bool positive = cursor < le.size() && le[cursor].u == u && le[cursor].v == v;
    (positive ? ts.positives : ts.negatives).push_back({u, v, positive ? 1.0 : 0.0});
  });
  Rng rng(seed);
  if (max_positives > 0) sample_without_replacement(ts.positives, max_positives, rng);
  const auto negatives =
      static_cast<std::size_t>(std::llround(neg_ratio * static_cast<double>(ts.positives.size())));
  sample_without_replacement(ts.negatives, negatives, rng);
  return ts;
}

std::pair<std::vector<LabeledPair>, std::vector<LabeledPair>> split_pairs(
    const std::vector<LabeledPair>& pairs, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction >= 0.0 && holdout_fraction <= 1.0)) {
    throw std::invalid_argument("holdout fraction must lie in [0, 1]");
  }
  std::vector<LabeledPair> shuffled(pairs);
  Rng rng(seed);
  shuffle_in_place(shuffled, rng);
  const auto holdout = static_cast<std::size_t>(
      std::llround(holdout_fraction * static_cast<double>(shuffled.size())));
  std::vector<LabeledPair> held(shuffled.end() - static_cast<std::ptrdiff_t>(holdout),
                                shuffled.end());
  shuffled.resize(shuffled.size() - holdout);
  return {std::move(shuffled), std::move(held)};
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"kind", to_string(c.model.kind)},
          {"hops", c.model.hops},
          {"width", c.model.width},
          {"head_hidden", c.model.head_hidden},
          {"fanout", c.model.fanout},
          {"max_nodes", c.model.max_nodes},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"step_size", c.step_size},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"neg_ratio", c.neg_ratio},
          {"max_positives", c.max_positives}};
}

namespace {

int extraction_hops(const LinkModel& m) {
  return m.kind() == ModelKind::kFeatureOnly ? 0 : m.hops();
}

// Binary cross-entropy of a logit, computed without overflow.
double bce_with_logit(double logit, double label) {
  return std::max(logit, 0.0) - label * logit + std::log1p(std::exp(-std::abs(logit)));
}

struct Worker {
  explicit Worker(const NeighborView& view) : extractor(view) {}
  SubgraphExtractor extractor;
  EnclosingSubgraph sg;
  detail::TowerPass pass;
  std::vector<double> grad;
  double loss = 0.0;
};

// Accumulates loss and (scaled) gradient over pairs[begin, end) of `batch`.
void accumulate(const LinkModel& m, const SocialGraph& g, const std::vector<LabeledPair>& pairs,
                const std::size_t* index, std::size_t count, double scale,
                std::vector<std::unique_ptr<Worker>>& workers, bool want_grad) {
  const std::size_t params = m.num_parameters();
  for (auto& w : workers) {
    w->loss = 0.0;
    if (want_grad) w->grad.assign(params, 0.0);
  }
  parallel_for_chunks(count, [&](unsigned wid, std::size_t begin, std::size_t end) {
    Worker& w = *workers[wid];
    for (std::size_t i = begin; i < end; ++i) {
      LabeledPair p = pairs[index ? index[i] : i];
      if (p.a > p.b) std::swap(p.a, p.b);
      w.extractor.extract(p.a, p.b, extraction_hops(m), m.config().max_nodes,
                          m.config().view_seed, w.sg);
      const double logit = w.pass.run(m, w.sg, g.feature_matrix());
      w.loss += bce_with_logit(logit, p.label) * scale;
      if (want_grad) w.pass.backward(m, (logistic(logit) - p.label) * scale, w.grad);
    }
  });
}

std::vector<std::unique_ptr<Worker>> make_workers(const NeighborView& view) {
  std::vector<std::unique_ptr<Worker>> workers;
  for (unsigned i = 0; i < std::max(1u, thread_count()); ++i) {
    workers.push_back(std::make_unique<Worker>(view));
  }
  return workers;
}

}  // namespace

double loss_and_gradient(const LinkModel& m, const SocialGraph& g,
                         const std::vector<LabeledPair>& pairs, std::vector<double>* grad) {
  if (pairs.empty()) throw std::invalid_argument("loss_and_gradient: no pairs");
  if (g.feature_dim() != m.feature_dim()) {
    throw std::invalid_argument("graph feature width does not match model");
  }
  const NeighborView view(g, m.config().fanout, m.config().view_seed);
  auto workers = make_workers(view);
  const double scale = 1.0 / static_cast<double>(pairs.size());
  accumulate(m, g, pairs, nullptr, pairs.size(), scale, workers, grad != nullptr);
  double loss = 0.0;
  if (grad) grad->assign(m.num_parameters(), 0.0);
  for (const auto& w : workers) {
    loss += w->loss;
    if (grad) {
      for (std::size_t i = 0; i < grad->size(); ++i) (*grad)[i] += w->grad[i];
    }
  }
  return loss;
}

TrainResult train(const TrainingSet& ts, const SocialGraph& g, const TrainConfig& config,
                  std::uint64_t seed) {
  if (ts.positives.empty() || ts.negatives.empty()) {
    throw std::invalid_argument("training set must contain both positive and negative pairs");
  }
  if (config.batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (!(config.step_size > 0.0)) throw ConfigError("step size must be > 0");
  LinkModelConfig model_config = config.model;
  model_config.feature_dim = g.feature_dim();
  TrainResult result{LinkModel::initialized(model_config, derive_seed(seed, 1)), {}};
  LinkModel& m = result.model;

  const std::vector<LabeledPair> pairs = ts.all();
  const NeighborView view(g, model_config.fanout, model_config.view_seed);
  auto workers = make_workers(view);
  const std::size_t params = m.num_parameters();
  std::vector<double> grad(params), first(params, 0.0), second(params, 0.0);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(seed, 100 + epoch));
    shuffle_in_place(order, rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      accumulate(m, g, pairs, order.data() + start, count, 1.0 / static_cast<double>(count),
                 workers, true);
      double loss = 0.0;
      std::fill(grad.begin(), grad.end(), 0.0);
      for (const auto& w : workers) {
        loss += w->loss;
        for (std::size_t i = 0; i < params; ++i) grad[i] += w->grad[i];
      }
      ++step;
      if (!std::isfinite(loss)) {
        throw NumericError("link model training diverged at step " + std::to_string(step));
      }
      result.loss_trace.push_back(loss);
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto& p = m.parameters();
      for (std::size_t i = 0; i < params; ++i) {
        first[i] = config.beta1 * first[i] + (1.0 - config.beta1) * grad[i];
        second[i] = config.beta2 * second[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        p[i] -= config.step_size * (first[i] / c1) / (std::sqrt(second[i] / c2) + config.epsilon);
      }
      for (double x : p) {
        if (!std::isfinite(x)) {
          throw NumericError("link model training diverged at step " + std::to_string(step));
        }
      }
    }
  }
  return result;
}

std::vector<double> score_pairs(const LinkModel& m, const SocialGraph& g,
                                const std::vector<LabeledPair>& pairs) {
  const LinkScorer scorer(m, g);
  std::vector<double> out(pairs.size());
  parallel_for_chunks(pairs.size(), [&](unsigned, std::size_t begin, std::size_t end) {
    auto scratch = scorer.make_scratch();
    for (std::size_t i = begin; i < end; ++i) out[i] = scorer.score(pairs[i].a, pairs[i].b, *scratch);
  });
  return out;
}

}  // namespace linklouvain
