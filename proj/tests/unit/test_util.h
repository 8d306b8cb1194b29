#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "linklouvain/graph.h"

namespace linklouvain::testing {

inline SocialGraph graph_of(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  std::vector<WeightedEdge> list;
  for (auto [u, v] : edges) list.push_back({u, v, 1.0});
  return SocialGraph::from_edges(n, std::move(list));
}

inline SocialGraph clique_pair(std::size_t k) {
  std::vector<WeightedEdge> list;
  for (std::size_t base : {std::size_t{0}, k}) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        list.push_back({static_cast<NodeId>(base + i), static_cast<NodeId>(base + j), 1.0});
      }
    }
  }
  return SocialGraph::from_edges(2 * k, std::move(list));
}

inline SocialGraph star(std::size_t leaves) {
  std::vector<WeightedEdge> list;
  for (std::size_t i = 1; i <= leaves; ++i) list.push_back({0, static_cast<NodeId>(i), 1.0});
  return SocialGraph::from_edges(leaves + 1, std::move(list));
}

inline SocialGraph path(std::size_t n) {
  std::vector<WeightedEdge> list;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    list.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 1.0});
  }
  return SocialGraph::from_edges(n, std::move(list));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "linklouvain_test";
    if (info) name += std::string("_") + info->test_suite_name() + "_" + info->name();
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace linklouvain::testing
