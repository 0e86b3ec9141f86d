#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsg/analysis.hpp"
#include "qsg/encoding.hpp"
#include "qsg/error.hpp"
#include "qsg/estimation.hpp"
#include "qsg/graph.hpp"
#include "qsg/minfinder.hpp"

namespace py = pybind11;
using namespace qsg;

namespace {

py::dict report_dict(const DistanceReport& r) {
    py::list rows;
    for (const auto& e : r.entries) {
        py::dict row;
        row["config_bits"] = e.config.to_string();
        row["D_quantum"] = e.quantum;
        row["D_classical"] = e.classical;
        row["abs_err"] = e.abs_err;
        rows.append(row);
    }
    py::dict d;
    d["rows"] = rows;
    d["shots"] = r.shots;
    d["seed"] = r.seed;
    d["delta"] = r.delta;
    d["alpha"] = r.norm.alpha;
    d["S"] = r.norm.S;
    d["W"] = r.norm.W;
    return d;
}

}  // namespace

PYBIND11_MODULE(_qsg, m) {
    m.doc() = "Most-similar subgraph search under fixed edge removal";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<ResourceCapError>(m, "ResourceCapError", base.ptr());
    py::register_exception<MalformedInput>(m, "MalformedInput", base.ptr());

    py::class_<WeightedGraph>(m, "Graph")
        .def(py::init([](std::size_t vertices, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
                 std::vector<Edge> list;
                 for (const auto& [r, s, b] : edges) {
                     list.push_back({r, s, b});
                 }
                 return WeightedGraph(vertices, std::move(list));
             }),
             py::arg("vertices"), py::arg("edges"))
        .def_static("from_file", &read_graph_file, py::arg("path"))
        .def_static("generate", [](const std::string& spec) { return generate_graph(spec); }, py::arg("spec"))
        .def_property_readonly("vertex_count", &WeightedGraph::vertex_count)
        .def_property_readonly("edge_count", &WeightedGraph::edge_count)
        .def_property_readonly("edges", [](const WeightedGraph& g) {
            std::vector<std::tuple<std::size_t, std::size_t, double>> out;
            for (const auto& e : g.edges()) {
                out.emplace_back(e.tail, e.head, e.weight);
            }
            return out;
        });

    m.def("configurations", [](std::size_t edges, std::size_t x) {
        std::vector<std::string> out;
        for (const auto& d : enumerate_configurations(edges, x)) {
            out.push_back(d.to_string());
        }
        return out;
    }, py::arg("edges"), py::arg("x"));

    m.def("frobenius_distance", [](const WeightedGraph& g, const std::string& bits) {
        return frobenius_distance_sparse(g, Configuration::from_string(bits));
    }, py::arg("graph"), py::arg("config"));

    m.def("argmin", [](const WeightedGraph& g, std::size_t x) {
        const ArgminResult r = argmin_bruteforce(g, x);
        return py::make_tuple(r.config.to_string(), r.distance);
    }, py::arg("graph"), py::arg("x"));

    m.def("sample_distances", [](const WeightedGraph& g, std::size_t x, std::uint64_t shots, std::uint64_t seed,
                                 std::size_t cap) {
        PrepareOptions opt;
        opt.cap = cap;
        return report_dict(sample_distances(prepare_psi_f(g, x, opt), g, shots, seed));
    }, py::arg("graph"), py::arg("x"), py::arg("shots"), py::arg("seed") = 0, py::arg("cap") = kDefaultQubitCap);

    m.def("exact_distances", [](const WeightedGraph& g, std::size_t x, std::size_t cap) {
        PrepareOptions opt;
        opt.cap = cap;
        return report_dict(reconstruct_distances_exact(prepare_psi_f(g, x, opt), g));
    }, py::arg("graph"), py::arg("x"), py::arg("cap") = kDefaultQubitCap);

    m.def("label_table", [](const WeightedGraph& g, std::size_t x, std::size_t a_eps, std::size_t cap) {
        EstimationOptions opt;
        opt.cap = cap;
        const LabeledState s = phase_estimate(g, x, a_eps, opt);
        py::dict out;
        for (std::size_t r = 0; r < s.configs().size(); ++r) {
            out[py::str(s.configs()[r].to_string())] = s.label_table()[r];
        }
        return out;
    }, py::arg("graph"), py::arg("x"), py::arg("a_eps") = 6, py::arg("cap") = kDefaultQubitCap);

    m.def("find_minimum", [](const WeightedGraph& g, std::size_t x, std::uint64_t seed, const std::string& mode,
                             std::size_t a_eps, std::optional<std::uint64_t> budget, std::size_t cap) {
        MinFinderOptions opt;
        opt.mode = parse_mode(mode);
        opt.a_eps = a_eps;
        opt.budget = budget;
        opt.cap = cap;
        const MinFinderResult r = find_minimum(g, x, seed, opt);
        py::dict out;
        out["d"] = r.config.to_string();
        out["d_tilde"] = r.config.to_tilde_string();
        out["D"] = r.distance;
        out["S"] = r.run.S;
        out["budget"] = r.run.budget;
        out["steps_used"] = r.run.steps_used;
        out["log"] = run_log_json_lines(r.run);
        return out;
    }, py::arg("graph"), py::arg("x"), py::arg("seed") = 0, py::arg("mode") = "full", py::arg("a_eps") = 6,
       py::arg("budget") = py::none(), py::arg("cap") = kDefaultQubitCap);

    m.def("quadratic_form_quantum", [](const WeightedGraph& g, const std::string& bits, const std::vector<double>& a,
                                       std::size_t cap) {
        return quadratic_form_quantum(g, Configuration::from_string(bits), a, cap);
    }, py::arg("graph"), py::arg("config"), py::arg("a"), py::arg("cap") = kDefaultQubitCap);

    m.def("quadratic_form_classical", [](const WeightedGraph& g, const std::string& bits, const std::vector<double>& a) {
        return quadratic_form_classical(g, Configuration::from_string(bits), a);
    }, py::arg("graph"), py::arg("config"), py::arg("a"));

    m.def("cost_model", [](std::size_t N, std::size_t M, std::size_t x, double eps) {
        const CostModel c = cost_model_eval(N, M, x, eps);
        py::dict out;
        out["N"] = c.N;
        out["M"] = c.M;
        out["x"] = c.x;
        out["eps"] = c.eps;
        out["S"] = c.S;
        out["t_min"] = c.t_min;
        out["t_cla"] = c.t_cla;
        out["n_min"] = c.n_min;
        out["t_AE"] = c.t_AE;
        out["t_cQ"] = c.t_cQ;
        out["notes"] = c.notes;
        return out;
    }, py::arg("N"), py::arg("M"), py::arg("x"), py::arg("eps") = 1.0);
}
