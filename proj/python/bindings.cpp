#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "distphylo/agglomerative.hpp"
#include "distphylo/cli.hpp"
#include "distphylo/distance.hpp"
#include "distphylo/errors.hpp"
#include "distphylo/io.hpp"
#include "distphylo/min_evolution.hpp"
#include "distphylo/mst.hpp"
#include "distphylo/nj.hpp"
#include "distphylo/properties.hpp"

namespace py = pybind11;
using namespace distphylo;

namespace {

template <class T, class Parse>
T named(Parse parse, const std::string& name, const char* what) {
  auto v = parse(name);
  if (!v) throw InputError(std::string("unknown ") + what + " '" + name + "'");
  return *v;
}

Metric parse_metric(const std::string& name) {
  if (name == "raw") return Metric::raw;
  if (name == "normalized") return Metric::normalized;
  if (name == "jc") return Metric::jc;
  throw InputError("unknown metric '" + name + "'");
}

WeightScheme parse_scheme(const std::string& name) {
  if (name == "gme" || name == "ols") return WeightScheme::ols;
  if (name == "bme" || name == "balanced") return WeightScheme::balanced;
  throw InputError("unknown addition scheme '" + name + "'");
}

py::list edge_list(const Forest& f) {
  py::list out;
  for (const auto& e : f.edges) out.append(py::make_tuple(f.labels[e.u], f.labels[e.v], e.weight));
  return out;
}

}  // namespace

PYBIND11_MODULE(distphylo, m) {
  m.doc() = "Distance-based phylogeny and MST methods";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  auto domain = py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SaturationError>(m, "SaturationError", domain.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

  py::class_<DistanceMatrix>(m, "DistanceMatrix")
      .def(py::init([](std::vector<std::string> labels, const std::vector<std::vector<double>>& rows) {
             return DistanceMatrix::from_rows(std::move(labels), rows);
           }),
           py::arg("labels"), py::arg("rows"))
      .def_static("from_phylip", [](const std::string& text) {
        std::istringstream in(text);
        return read_phylip_matrix(in);
      })
      .def("to_phylip", &write_phylip_matrix)
      .def_property_readonly("labels", &DistanceMatrix::labels)
      .def("__len__", &DistanceMatrix::size)
      .def("__getitem__",
           [](const DistanceMatrix& d, std::pair<std::size_t, std::size_t> ij) {
             if (ij.first >= d.size() || ij.second >= d.size()) throw py::index_error("matrix index out of range");
             return d(ij.first, ij.second);
           })
      .def("to_list", [](const DistanceMatrix& d) {
        std::vector<std::vector<double>> rows(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) rows[i].assign(d.row(i).begin(), d.row(i).end());
        return rows;
      });

  py::class_<PhyloTree>(m, "PhyloTree")
      .def_property_readonly("labels", &PhyloTree::labels)
      .def_property_readonly("edges",
                             [](const PhyloTree& t) {
                               py::list out;
                               for (const auto& e : t.edges()) out.append(py::make_tuple(e.a, e.b, e.length));
                               return out;
                             })
      .def("total_length", &PhyloTree::total_length)
      .def("path_distance", &PhyloTree::path_distance)
      .def("path_distances", &PhyloTree::path_distances)
      .def("newick", [](const PhyloTree& t, int precision) { return write_newick(t, precision); },
           py::arg("precision") = 10);

  py::class_<Dendrogram>(m, "Dendrogram")
      .def_property_readonly("labels", [](const Dendrogram& d) { return d.labels; })
      .def_property_readonly("merges",
                             [](const Dendrogram& d) {
                               py::list out;
                               for (const auto& s : d.merges) out.append(py::make_tuple(s.left, s.right, s.height));
                               return out;
                             })
      .def("cophenetic", &Dendrogram::cophenetic)
      .def("newick", [](const Dendrogram& d, int precision) { return write_newick(d, precision); },
           py::arg("precision") = 10);

  m.def("hamming", [](const std::string& a, const std::string& b) { return hamming_raw(a, b).diff; });
  m.def("normalized_hamming", py::overload_cast<std::string_view, std::string_view>(&normalized_hamming));
  m.def(
      "jc_correct",
      [](double h, std::optional<double> ceiling) { return jc_correct(h, JcOptions{ceiling}); }, py::arg("h"),
      py::arg("ceiling") = py::none());

  m.def(
      "profile_distances",
      [](const std::string& text, const std::string& metric, bool pairwise) {
        std::istringstream in(text);
        DistanceOptions opt;
        opt.metric = parse_metric(metric);
        if (pairwise) opt.policy.mode = MissingMode::pairwise_deletion;
        return build_distance_matrix(read_profiles(in), opt);
      },
      py::arg("text"), py::arg("metric") = "raw", py::arg("pairwise_deletion") = false);

  m.def(
      "sequence_distances",
      [](std::vector<std::string> labels, std::vector<std::string> sequences, const std::string& metric) {
        CharacterSequenceSet s{std::move(labels), std::move(sequences)};
        DistanceOptions opt;
        opt.metric = parse_metric(metric);
        return build_distance_matrix(s, opt);
      },
      py::arg("labels"), py::arg("sequences"), py::arg("metric") = "normalized");

  m.def(
      "neighbor_joining",
      [](const DistanceMatrix& d, const std::string& method) {
        return run_nj(d, named<NjVariant>(parse_nj_variant, method, "method"));
      },
      py::arg("matrix"), py::arg("method") = "nj-sk");

  m.def(
      "cluster",
      [](const DistanceMatrix& d, const std::string& method, const std::string& engine) {
        auto kind = named<ReductionKind>(parse_reduction_kind, method, "method");
        if (engine == "naive") return run_gcp(d, kind);
        if (engine == "nn-chain") return run_nn_chain(d, kind);
        throw InputError("unknown engine '" + engine + "'");
      },
      py::arg("matrix"), py::arg("method") = "upgma", py::arg("engine") = "naive");

  m.def(
      "min_evolution",
      [](const DistanceMatrix& d, const std::string& scheme, std::optional<std::uint64_t> seed) {
        auto order = insertion_sequence(d.size(), seed ? InsertionOrder::random : InsertionOrder::input, seed.value_or(0));
        return run_addition(d, parse_scheme(scheme), order);
      },
      py::arg("matrix"), py::arg("scheme") = "gme", py::arg("seed") = py::none());

  m.def(
      "mst",
      [](const DistanceMatrix& d, const std::string& algorithm) {
        auto alg = named<MstAlgorithm>(parse_mst_algorithm, algorithm, "algorithm");
        return edge_list(generic_mst(WeightedGraph::complete(d), natural_edge_order(), alg));
      },
      py::arg("matrix"), py::arg("algorithm") = "kruskal");

  m.def(
      "goeburst",
      [](const DistanceMatrix& d, std::optional<std::size_t> level) {
        return edge_list(level ? run_goeburst(d, *level) : run_goeburst_full_mst(d));
      },
      py::arg("matrix"), py::arg("level") = py::none());

  m.def(
      "fhp",
      [](std::vector<std::string> labels, std::vector<std::string> sequences) {
        auto t = run_fhp(CharacterSequenceSet{std::move(labels), std::move(sequences)});
        py::dict nodes;
        for (std::size_t i = 0; i < t.labels.size(); ++i) nodes[py::str(t.labels[i])] = t.sequences[i];
        py::list edges;
        for (const auto& e : t.edges) edges.append(py::make_tuple(t.labels[e.u], t.labels[e.v], e.weight));
        return py::make_tuple(nodes, edges);
      },
      py::arg("labels"), py::arg("sequences"));

  m.def(
      "check_property",
      [](const std::string& rule, const std::string& property, std::size_t trials, std::uint64_t seed) {
        auto r = named<PropertyRule>(parse_property_rule, rule, "rule");
        if (property == "convexity") return check_convexity(r, trials, seed).holds;
        if (property == "commutativity") return check_commutativity(r, trials, seed).holds;
        throw InputError("unknown property '" + property + "'");
      },
      py::arg("rule"), py::arg("property") = "convexity", py::arg("trials") = 10000, py::arg("seed") = 0);

  m.def("topology_counts", [](std::size_t n) {
    auto c = tree_topology_counts(n);
    py::object as_int = py::module_::import("builtins").attr("int");
    py::object unrooted = c.unrooted ? as_int(c.unrooted->str()) : py::none();
    return py::make_tuple(unrooted, as_int(c.rooted.str()));
  });

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& input) {
        std::istringstream in(input);
        std::ostringstream out, err;
        int code = run_cli(args, in, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "");
}
