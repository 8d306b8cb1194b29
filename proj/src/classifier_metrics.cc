#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "linklouvain/link_training.h"

namespace linklouvain {

ClassifierReport evaluate_classifier(const std::vector<double>& scores,
                                     const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("evaluate_classifier: scores and labels differ in length");
  }
  ClassifierReport r;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw std::invalid_argument("evaluate_classifier: labels must be 0 or 1");
    }
    if (std::isnan(scores[i])) throw std::invalid_argument("evaluate_classifier: NaN score");
    if (labels[i] == 1) {
      ++r.positives;
      if (scores[i] >= 0.5) ++tp;
    } else {
      ++r.negatives;
      if (scores[i] >= 0.5) ++fp;
    }
  }
  if (r.positives == 0 || r.negatives == 0) {
    throw std::invalid_argument("evaluate_classifier: both classes must be present");
  }
  const std::size_t fn = r.positives - tp;
  r.f1 = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk groups of tied scores once for both statistics.
  const double np = static_cast<double>(r.positives);
  const double nn = static_cast<double>(r.negatives);
  double rank_sum = 0.0;
  std::size_t seen_pos = 0, seen_neg = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t group_pos = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1) ++group_pos;
      ++j;
    }
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += mean_rank * static_cast<double>(group_pos);
    seen_pos += group_pos;
    seen_neg += (j - i) - group_pos;
    r.ks = std::max(r.ks, std::abs(static_cast<double>(seen_neg) / nn -
                                   static_cast<double>(seen_pos) / np));
    i = j;
  }
  r.auc = (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
  return r;
}

nlohmann::json to_json(const ClassifierReport& r) {
  return {{"f1", r.f1},
          {"ks", r.ks},
          {"auc", r.auc},
          {"positives", r.positives},
          {"negatives", r.negatives}};
}

}  // namespace linklouvain
