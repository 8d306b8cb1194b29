#include <numeric>

#include "linklouvain/cluster.h"
#include "linklouvain/random.h"

namespace linklouvain {

Clustering label_propagation(const SocialGraph& g, std::uint64_t seed, std::size_t max_iters) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(seed);
  // Initial labels are a seeded permutation; with identity labels the
  // smallest-label tie rule favors low node ids.
  std::vector<NodeId> label = order;
  shuffle_in_place(label, rng);

  std::vector<double> score(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<NodeId> touched;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    shuffle_in_place(order, rng);
    std::size_t changes = 0;
    for (NodeId v : order) {
      const auto nbrs = g.neighbors(v);
      if (nbrs.empty()) continue;
      const auto w = g.weights(v);
      touched.clear();
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const NodeId l = label[nbrs[i]];
        if (!seen[l]) {
          seen[l] = 1;
          touched.push_back(l);
        }
        score[l] += w[i];
      }
      NodeId best = touched.front();
      for (NodeId l : touched) {
        if (score[l] > score[best] || (score[l] == score[best] && l < best)) best = l;
      }
      for (NodeId l : touched) {
        score[l] = 0.0;
        seen[l] = 0;
      }
      if (best != label[v]) {
        label[v] = best;
        ++changes;
      }
    }
    if (changes == 0) break;
  }
  std::vector<std::uint64_t> labels(label.begin(), label.end());
  Clustering c = make_clustering(labels);
  if (g.total_weight() > 0.0) c.modularity = modularity(g, c.assignment);
  return c;
}

}  // namespace linklouvain
