#include "linklouvain/assign.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "linklouvain/errors.h"
#include "linklouvain/random.h"

namespace linklouvain {
namespace {

void finalize(GroupAssignment& a) {
  a.node_to_group.resize(a.node_to_cluster.size());
  a.group_node_counts.assign(a.num_groups, 0);
  a.group_cluster_counts.assign(a.num_groups, 0);
  for (std::size_t v = 0; v < a.node_to_cluster.size(); ++v) {
    const GroupId g = a.cluster_to_group[a.node_to_cluster[v]];
    a.node_to_group[v] = g;
    if (g != kExcludedGroup) ++a.group_node_counts[g];
  }
  for (GroupId g : a.cluster_to_group) {
    if (g != kExcludedGroup) ++a.group_cluster_counts[g];
  }
}

}  // namespace

std::vector<std::uint8_t> GroupAssignment::treated_flags() const {
  std::vector<GroupId> treat(num_groups / 2);
  std::iota(treat.begin(), treat.end(), GroupId{0});
  return treated_flags(treat);
}

std::vector<std::uint8_t> GroupAssignment::treated_flags(
    const std::vector<GroupId>& treat_groups) const {
  std::vector<std::uint8_t> is_treat_group(num_groups, 0);
  for (GroupId g : treat_groups) {
    if (g >= num_groups) throw std::invalid_argument("treatment group id out of range");
    is_treat_group[g] = 1;
  }
  std::vector<std::uint8_t> flags(node_to_group.size(), 0);
  for (std::size_t v = 0; v < flags.size(); ++v) {
    const GroupId g = node_to_group[v];
    flags[v] = g != kExcludedGroup && is_treat_group[g];
  }
  return flags;
}

MergeMode parse_merge_mode(const std::string& name) {
  if (name == "uniform") return MergeMode::kUniform;
  if (name == "size_balanced") return MergeMode::kSizeBalanced;
  throw ConfigError("unknown merge mode '" + name + "' (expected uniform|size_balanced)");
}

std::string to_string(MergeMode mode) {
  return mode == MergeMode::kUniform ? "uniform" : "size_balanced";
}

GroupAssignment merge_random(const Clustering& c, std::size_t groups, std::uint64_t seed,
                             MergeMode mode) {
  if (groups < 2) throw std::invalid_argument("merge_random: need at least 2 groups");
  if (c.num_clusters() < groups) {
    throw std::invalid_argument("merge_random: " + std::to_string(c.num_clusters()) +
                                " clusters cannot fill " + std::to_string(groups) + " groups");
  }
  GroupAssignment a;
  a.num_groups = groups;
  a.seed = seed;
  a.node_to_cluster = c.assignment;
  a.cluster_sizes = c.cluster_sizes;
  a.cluster_to_group.assign(c.num_clusters(), 0);
  Rng rng(seed);
  if (mode == MergeMode::kUniform) {
    std::uniform_int_distribution<GroupId> pick(0, static_cast<GroupId>(groups - 1));
    for (auto& g : a.cluster_to_group) g = pick(rng);
  } else {
    std::vector<ClusterId> order(c.num_clusters());
    std::iota(order.begin(), order.end(), ClusterId{0});
    shuffle_in_place(order, rng);
    std::vector<std::size_t> load(groups, 0);
    for (ClusterId cid : order) {
      const auto smallest = static_cast<GroupId>(
          std::min_element(load.begin(), load.end()) - load.begin());
      a.cluster_to_group[cid] = smallest;
      load[smallest] += c.cluster_sizes[cid];
    }
  }
  finalize(a);
  return a;
}

GroupAssignment user_level_randomization(std::size_t n, std::size_t groups, std::uint64_t seed) {
  if (groups == 0) throw std::invalid_argument("user_level_randomization: need at least 1 group");
  const Clustering singletons = singleton_clustering(n);
  if (groups == 1 || n < groups) {
    GroupAssignment a;
    a.num_groups = groups;
    a.seed = seed;
    a.node_to_cluster = singletons.assignment;
    a.cluster_sizes = singletons.cluster_sizes;
    a.cluster_to_group.assign(n, 0);
    if (groups > 1) {
      Rng rng(seed);
      std::uniform_int_distribution<GroupId> pick(0, static_cast<GroupId>(groups - 1));
      for (auto& g : a.cluster_to_group) g = pick(rng);
    }
    finalize(a);
    return a;
  }
  return merge_random(singletons, groups, seed, MergeMode::kUniform);
}

GroupAssignment group_traffic_slice(const GroupAssignment& a, double fraction,
                                    std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("group_traffic_slice: fraction must be in (0, 1]");
  }
  const std::size_t n = a.num_nodes();
  if (n == 0) throw std::invalid_argument("group_traffic_slice: empty assignment");
  const std::size_t smallest = *std::min_element(a.cluster_sizes.begin(), a.cluster_sizes.end());
  const double target = fraction * static_cast<double>(n);
  if (target < static_cast<double>(smallest)) {
    throw std::invalid_argument("group_traffic_slice: fraction is below the smallest cluster's share");
  }
  if (fraction == 1.0) return a;

  std::vector<ClusterId> order(a.num_clusters());
  std::iota(order.begin(), order.end(), ClusterId{0});
  Rng rng(seed);
  shuffle_in_place(order, rng);

  std::vector<char> keep(a.num_clusters(), 0);
  double total = 0.0;
  for (ClusterId c : order) {
    const double size = static_cast<double>(a.cluster_sizes[c]);
    if (total + size <= target) {
      keep[c] = 1;
      total += size;
    }
  }
  // Everything left out is larger than the remaining gap; one more cluster
  // helps only if it lands closer to the target.
  if (total < target) {
    ClusterId best = 0;
    bool found = false;
    for (ClusterId c : order) {
      if (keep[c]) continue;
      if (!found || a.cluster_sizes[c] < a.cluster_sizes[best]) {
        best = c;
        found = true;
      }
    }
    if (found) {
      const double over = total + static_cast<double>(a.cluster_sizes[best]) - target;
      if (over < target - total) keep[best] = 1;
    }
  }

  GroupAssignment out = a;
  out.seed = seed;
  for (std::size_t c = 0; c < out.cluster_to_group.size(); ++c) {
    if (!keep[c]) out.cluster_to_group[c] = kExcludedGroup;
  }
  finalize(out);
  return out;
}

void write_assignment(const GroupAssignment& a, const SocialGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (NodeId v = 0; v < a.num_nodes(); ++v) {
    out << g.external_id(v) << '\t';
    if (a.node_to_group[v] == kExcludedGroup) {
      out << -1;
    } else {
      out << a.node_to_group[v];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

GroupAssignment load_assignment(const std::string& path, const SocialGraph& g,
                                const Clustering* clusters) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open input file: " + path);
  const std::size_t n = g.num_nodes();
  if (clusters && clusters->num_nodes() != n) {
    throw std::invalid_argument("clustering does not cover the graph");
  }
  constexpr GroupId kUnset = kExcludedGroup - 1;
  std::vector<GroupId> node_group(n, kUnset);
  std::string line;
  std::size_t line_no = 0;
  GroupId max_group = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path, line_no, "expected node<TAB>group");
    try {
      const long long node = std::stoll(line.substr(0, tab));
      const long long group = std::stoll(line.substr(tab + 1));
      if (group < -1 || group >= static_cast<long long>(kUnset)) {
        throw ParseError(path, line_no, "group id out of range");
      }
      const GroupId gid = group < 0 ? kExcludedGroup : static_cast<GroupId>(group);
      node_group[g.dense_id(node)] = gid;
      if (gid != kExcludedGroup) {
        max_group = std::max(max_group, gid);
        any = true;
      }
    } catch (const std::out_of_range& e) {
      throw ParseError(path, line_no, std::string("unknown node or id out of range: ") + e.what());
    } catch (const std::invalid_argument&) {
      throw ParseError(path, line_no, "malformed row");
    }
  }
  GroupAssignment a;
  a.num_groups = any ? max_group + 1 : 0;
  if (clusters) {
    a.node_to_cluster = clusters->assignment;
    a.cluster_sizes = clusters->cluster_sizes;
  } else {
    a.node_to_cluster.resize(n);
    std::iota(a.node_to_cluster.begin(), a.node_to_cluster.end(), ClusterId{0});
    a.cluster_sizes.assign(n, 1);
  }
  a.cluster_to_group.assign(a.cluster_sizes.size(), kUnset);
  for (std::size_t v = 0; v < n; ++v) {
    if (node_group[v] == kUnset) {
      throw ParseError(path, line_no,
                       "node " + std::to_string(g.external_id(static_cast<NodeId>(v))) +
                           " has no group");
    }
    GroupId& cg = a.cluster_to_group[a.node_to_cluster[v]];
    if (cg != kUnset && cg != node_group[v]) {
      throw ParseError(path, line_no,
                       "cluster of node " + std::to_string(g.external_id(static_cast<NodeId>(v))) +
                           " spans several groups");
    }
    cg = node_group[v];
  }
  for (GroupId& cg : a.cluster_to_group) {
    if (cg == kUnset) cg = kExcludedGroup;
  }
  finalize(a);
  return a;
}

nlohmann::json assignment_summary(const GroupAssignment& a) {
  std::size_t excluded = 0;
  for (GroupId g : a.node_to_group) excluded += g == kExcludedGroup;
  return {{"groups", a.num_groups},
          {"seed", a.seed},
          {"node_count", a.num_nodes()},
          {"cluster_count", a.num_clusters()},
          {"group_node_counts", a.group_node_counts},
          {"group_cluster_counts", a.group_cluster_counts},
          {"excluded_nodes", excluded}};
}

}  // namespace linklouvain
