#pragma once

#include <cstddef>
#include <string>

#include "linklouvain/graph.h"

namespace linklouvain {

// Edge list text format: one edge per line, `src<TAB>dst[<TAB>weight]`,
// weight defaulting to 1.0. Lines starting with '#' are comments. A comment
// of the form `#@node<TAB>id` declares a node, which lets isolated nodes
// survive a write/load cycle; other readers simply ignore it.
//
// External ids are 64-bit signed integers; dense ids follow ascending
// external id order.
struct EdgeListLoad {
  SocialGraph graph;
  std::size_t rows = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
};

// Throws MissingInputError if the file cannot be opened and ParseError on a
// malformed row. An empty file yields an empty graph.
EdgeListLoad load_edge_list(const std::string& path);

// Writes the canonical edge set (u < v in dense order) with external ids and
// shortest round-trip weights, plus `#@node` lines for isolated nodes.
void write_edge_list(const SocialGraph& g, const std::string& path);

// Label graph: `src<TAB>dst<TAB>day`, ids resolved through `g`. The horizon
// is the maximum of `horizon` and the largest day seen.
LabelGraph load_label_graph(const std::string& path, const SocialGraph& g, int horizon = 0);
void write_label_graph(const LabelGraph& l, const SocialGraph& g, const std::string& path);

// Header-less CSV, row i = features of dense node i.
FeatureMatrix load_features(const std::string& path);
void write_features(const FeatureMatrix& f, const std::string& path);

// Formats a double with the shortest representation that round-trips.
std::string format_double(double x);

}  // namespace linklouvain
