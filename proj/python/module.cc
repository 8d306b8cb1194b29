#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "linklouvain/config.h"
#include "linklouvain/errors.h"
#include "linklouvain/graph_stats.h"

namespace py = pybind11;
using namespace linklouvain;

namespace {

RunConfig config_from(const std::string& text) {
  RunConfig c = default_config();
  if (!text.empty()) apply_config(c, parse_config_text(text, "<python>"));
  return c;
}

SocialGraph graph_from(std::size_t n, const std::vector<std::tuple<NodeId, NodeId, double>>& edges) {
  std::vector<WeightedEdge> e;
  e.reserve(edges.size());
  for (const auto& [u, v, w] : edges) e.push_back({u, v, w});
  return SocialGraph::from_edges(n, e);
}

py::dict clustering_dict(const Clustering& c) {
  py::dict d;
  d["assignment"] = c.assignment;
  d["sizes"] = c.cluster_sizes;
  d["modularity"] = c.modularity;
  d["trace"] = c.modularity_trace;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Link-prediction filtered clustering for network experiments.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<MissingInputError>(m, "MissingInputError", PyExc_FileNotFoundError);

  py::class_<SocialGraph>(m, "Graph")
      .def(py::init(&graph_from), py::arg("num_nodes"), py::arg("edges"))
      .def_property_readonly("num_nodes", &SocialGraph::num_nodes)
      .def_property_readonly("num_edges", &SocialGraph::num_edges)
      .def("degree", &SocialGraph::degree)
      .def("edges", [](const SocialGraph& g) {
        std::vector<std::tuple<NodeId, NodeId, double>> out;
        g.for_each_edge([&](NodeId u, NodeId v, double w) { out.emplace_back(u, v, w); });
        return out;
      });

  m.def("default_config", [] { return to_json(default_config()).dump(); },
        "Default configuration as a JSON string.");

  m.def(
      "generate_graph",
      [](const std::string& config, std::uint64_t seed) {
        GraphGenSpec spec = config_from(config).graph;
        spec.seed = seed;
        GeneratedGraph gen = generate_graph(spec);
        return py::make_tuple(std::move(gen.graph), gen.block, gen.region);
      },
      py::arg("config") = "", py::arg("seed") = 0);

  m.def("modularity", &modularity, py::arg("graph"), py::arg("assignment"),
        py::arg("resolution") = 1.0);
  m.def(
      "louvain",
      [](const SocialGraph& g, std::uint64_t seed, double resolution) {
        ModularityParams p;
        p.seed = seed;
        p.resolution = resolution;
        return clustering_dict(louvain(g, p));
      },
      py::arg("graph"), py::arg("seed") = 0, py::arg("resolution") = 1.0);
  m.def(
      "label_propagation",
      [](const SocialGraph& g, std::uint64_t seed, std::size_t max_iters) {
        return clustering_dict(label_propagation(g, seed, max_iters));
      },
      py::arg("graph"), py::arg("seed") = 0, py::arg("max_iters") = 100);

  m.def(
      "merge_random",
      [](const std::vector<ClusterId>& assignment, std::size_t groups, std::uint64_t seed) {
        return merge_random(make_clustering({assignment.begin(), assignment.end()}), groups, seed)
            .node_to_group;
      },
      py::arg("assignment"), py::arg("groups") = 2, py::arg("seed") = 0);

  m.def(
      "estimator_variance",
      [](std::vector<double> sums, std::vector<double> counts) {
        return estimator_variance(make_cluster_stats(std::move(sums), std::move(counts)));
      },
      py::arg("sums"), py::arg("counts"));

  m.def(
      "interference",
      [](const std::vector<GroupId>& groups,
         const std::vector<std::tuple<NodeId, NodeId, int>>& label_edges) {
        std::vector<LabelEdge> e;
        int horizon = 0;
        for (const auto& [u, v, d] : label_edges) {
          e.push_back({u, v, d});
          horizon = std::max(horizon, d);
        }
        GroupAssignment a = user_level_randomization(groups.size(), 1, 0);
        a.node_to_group = groups;
        return interference(a, LabelGraph(groups.size(), horizon, std::move(e)), horizon);
      },
      py::arg("groups"), py::arg("label_edges"));

  m.def(
      "compare",
      [](const std::string& config) {
        const RunConfig c = config_from(config);
        std::vector<ComparisonRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_comparison(comparison_spec(c), c.methods, comparison_seeds(c));
        }
        return to_json(rows, c.include_timing).dump();
      },
      py::arg("config") = "", "Runs the method comparison; returns rows as a JSON string.");
}
