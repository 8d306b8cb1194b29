#pragma once

// Shared forward/backward pass of the twin-tower model. Internal to the
// library: scoring and training both run through TowerPass so that the two
// paths produce identical numbers.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "linklouvain/enclosing_subgraph.h"
#include "linklouvain/graph.h"
#include "linklouvain/link_model.h"

namespace linklouvain::detail {

// out[0..width) = W1x * mx, where W1x is the feature block of layer 1. Used for
// both the per-node projection cache and uncached passes.
void project_features(const LinkModel& m, const double* mx, double* out);

// Precomputed layer-1 feature projections over a NeighborView: row v holds
// project_features(mean of x over view.out(v) and v).
std::vector<double> projection_cache(const LinkModel& m, const NeighborView& view,
                                     const FeatureMatrix& x);

class TowerPass {
 public:
  // Pre-logistic output for targets (0, 1) of sg. When cache is non-null, a
  // layer-1 node whose local neighbor list is its full view list reads its
  // projection from the cache.
  double run(const LinkModel& m, const EnclosingSubgraph& sg, const FeatureMatrix& x,
             const std::vector<double>* cache = nullptr, const NeighborView* view = nullptr);

  // Adds dlogit * d(logit)/d(params) into grad (same layout as parameters()).
  // Must follow run() without a cache.
  void backward(const LinkModel& m, double dlogit, std::vector<double>& grad);

 private:
  std::size_t width_ = 0;
  int hops_ = 0;
  std::vector<int> local_dist_;
  std::vector<std::uint32_t> queue_;
  // Per level k = 1..K (index k - 1).
  std::vector<std::vector<std::uint32_t>> level_nodes_;
  std::vector<std::vector<std::int32_t>> row_of_;
  std::vector<std::vector<double>> pre_;
  std::vector<std::vector<double>> act_;
  // Aggregated inputs: level 1 holds feature means (dim d); higher levels hold
  // means of the previous activations (dim width).
  std::vector<std::vector<double>> agg_;
  std::vector<double> label_frac_;  // level-1 rows x label width
  std::vector<std::uint8_t> labels_;
  std::vector<double> counts_;
  std::vector<double> concat_ab_, concat_ba_;
  std::vector<double> head_pre_ab_, head_pre_ba_;
  std::vector<double> head_act_ab_, head_act_ba_;
  std::vector<double> grad_act_, grad_prev_, grad_pre_, grad_concat_;
  const EnclosingSubgraph* sg_ = nullptr;
};

}  // namespace linklouvain::detail
