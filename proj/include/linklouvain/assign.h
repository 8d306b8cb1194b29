#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "linklouvain/cluster.h"
#include "linklouvain/graph.h"

namespace linklouvain {

using GroupId = std::uint32_t;
inline constexpr GroupId kExcludedGroup = std::numeric_limits<GroupId>::max();

enum class MergeMode { kUniform, kSizeBalanced };

// Clusters merged into test groups. Clusters are never split: node_to_group
// is cluster_to_group composed with node_to_cluster. Nodes of clusters left
// out by a traffic slice map to kExcludedGroup.
struct GroupAssignment {
  std::size_t num_groups = 0;
  std::uint64_t seed = 0;
  std::vector<ClusterId> node_to_cluster;
  std::vector<std::size_t> cluster_sizes;
  std::vector<GroupId> cluster_to_group;
  std::vector<GroupId> node_to_group;
  std::vector<std::size_t> group_node_counts;
  std::vector<std::size_t> group_cluster_counts;

  std::size_t num_nodes() const { return node_to_group.size(); }
  std::size_t num_clusters() const { return cluster_to_group.size(); }
  // Nodes whose group is in the half-open range [0, num_groups / 2) are
  // treated; with two groups that is group 0.
  std::vector<std::uint8_t> treated_flags() const;
  std::vector<std::uint8_t> treated_flags(const std::vector<GroupId>& treat_groups) const;
};

MergeMode parse_merge_mode(const std::string& name);
std::string to_string(MergeMode mode);

// Throws std::invalid_argument when groups < 2 or the clustering has fewer
// clusters than groups.
GroupAssignment merge_random(const Clustering& c, std::size_t groups, std::uint64_t seed,
                             MergeMode mode = MergeMode::kSizeBalanced);

// Each node independently uniform over groups. groups == 1 is accepted and
// puts every node in group 0.
GroupAssignment user_level_randomization(std::size_t n, std::size_t groups, std::uint64_t seed);

// Keeps a seeded random subset of whole clusters whose node share is as close
// as possible to `fraction` (never above it by more than one cluster); the
// kept clusters retain their groups. Throws std::invalid_argument when
// fraction is outside (0, 1] or below the smallest cluster's share.
GroupAssignment group_traffic_slice(const GroupAssignment& a, double fraction, std::uint64_t seed);

// `node_id<TAB>group_id` text; excluded nodes are written as -1.
void write_assignment(const GroupAssignment& a, const SocialGraph& g, const std::string& path);
// Reads a file written by write_assignment. The clustering supplies the
// cluster structure (singletons when null); every cluster must map to exactly
// one group. Throws MissingInputError or ParseError.
GroupAssignment load_assignment(const std::string& path, const SocialGraph& g,
                                const Clustering* clusters = nullptr);
nlohmann::json assignment_summary(const GroupAssignment& a);

}  // namespace linklouvain
