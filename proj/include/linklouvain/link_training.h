#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "linklouvain/graph.h"
#include "linklouvain/link_model.h"

namespace linklouvain {

struct LabeledPair {
  NodeId a = 0;
  NodeId b = 0;
  double label = 0.0;
};

// Positives are G-edges present in the label graph; negatives are G-edges
// absent from it. Both lists hold pairs oriented a < b.
struct TrainingSet {
  std::vector<LabeledPair> positives;
  std::vector<LabeledPair> negatives;

  std::size_t size() const { return positives.size() + negatives.size(); }
  std::vector<LabeledPair> all() const;
};

// Samples up to max_positives positives (0 keeps all) and
// round(neg_ratio * positives) negatives, both uniformly without replacement.
// Label edges that are not G-edges are ignored.
TrainingSet make_training_set(const SocialGraph& g, const LabelGraph& labels, double neg_ratio,
                              std::size_t max_positives, std::uint64_t seed);

// Splits a shuffled copy of `pairs` into (train, holdout) with the given
// holdout fraction.
std::pair<std::vector<LabeledPair>, std::vector<LabeledPair>> split_pairs(
    const std::vector<LabeledPair>& pairs, double holdout_fraction, std::uint64_t seed);

struct TrainConfig {
  LinkModelConfig model;
  std::size_t epochs = 5;
  std::size_t batch_size = 256;
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double neg_ratio = 1.0;
  std::size_t max_positives = 0;
};

nlohmann::json to_json(const TrainConfig& c);

struct TrainResult {
  LinkModel model;
  // Mean mini-batch loss per optimizer step.
  std::vector<double> loss_trace;
};

// Mini-batch Adam on binary cross-entropy. Deterministic for a given seed and
// thread count. Throws std::invalid_argument when a class is missing and
// NumericError when the loss becomes non-finite.
TrainResult train(const TrainingSet& ts, const SocialGraph& g, const TrainConfig& config,
                  std::uint64_t seed);

// Mean binary cross-entropy over `pairs`; when grad is non-null it receives
// the gradient with respect to m.parameters().
double loss_and_gradient(const LinkModel& m, const SocialGraph& g,
                         const std::vector<LabeledPair>& pairs, std::vector<double>* grad);

std::vector<double> score_pairs(const LinkModel& m, const SocialGraph& g,
                                const std::vector<LabeledPair>& pairs);

struct ClassifierReport {
  double f1 = 0.0;
  double ks = 0.0;
  double auc = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// F1 at threshold 0.5 (score >= 0.5 predicts positive), KS as the largest gap
// between the class-conditional score CDFs, AUC as the normalized rank-sum
// statistic with tied ranks averaged. Throws std::invalid_argument on size
// mismatch, non-binary labels, or a missing class.
ClassifierReport evaluate_classifier(const std::vector<double>& scores,
                                     const std::vector<int>& labels);

nlohmann::json to_json(const ClassifierReport& r);

}  // namespace linklouvain
