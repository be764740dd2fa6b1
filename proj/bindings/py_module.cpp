#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "cyclicbp/geometry.hpp"
#include "cyclicbp/scenario.hpp"

namespace py = pybind11;
using namespace cyclicbp;

namespace {

std::string region_repr(const Region& r) {
    std::ostringstream out;
    out << "Region(kind=" << to_string(r.kind()) << ", dim=" << r.dim() << ")";
    return out.str();
}

py::dict artifacts_to_dict(const RunArtifacts& artifacts) {
    py::dict out;
    out["scenario"] = artifacts.scenario_name;
    out["report_text"] = artifacts.report_text;
    out["machine_json"] = artifacts.machine_json;
    py::list traces;
    for (const auto& t : artifacts.traces) traces.append(t);
    out["traces"] = traces;
    out["required_checks_pass"] = required_checks_pass(artifacts.checks);
    return out;
}

RunOverrides make_overrides(std::optional<double> tol, std::optional<std::size_t> max_steps,
                            std::optional<std::uint64_t> seed, bool parallel) {
    RunOverrides overrides;
    overrides.tol = tol;
    overrides.max_steps = max_steps;
    overrides.seed = seed;
    overrides.parallel = parallel;
    return overrides;
}

}  // namespace

PYBIND11_MODULE(_cyclicbp, m) {
    m.doc() = "Cyclic multivalued iteration toolkit: set geometry, contraction "
              "certificates, and order-respecting trajectories";

    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

    py::class_<Region>(m, "Region")
        .def_static("interval", &Region::interval, py::arg("lower"), py::arg("upper"))
        .def_static("box", &Region::box, py::arg("lower"), py::arg("upper"))
        .def_static("ball", &Region::ball, py::arg("center"), py::arg("radius"))
        .def_static("cloud", &Region::cloud, py::arg("points"))
        .def_property_readonly("dim", &Region::dim)
        .def_property_readonly("kind", [](const Region& r) { return to_string(r.kind()); })
        .def("contains", &Region::contains, py::arg("x"), py::arg("tol") = kDefaultTol)
        .def("__repr__", &region_repr);

    m.def("metric", &metric, py::arg("x"), py::arg("y"), "Euclidean distance between points");
    m.def("point_to_set_distance", &point_to_set_distance, py::arg("x"), py::arg("region"));
    m.def("nearest_point", &nearest_point, py::arg("x"), py::arg("region"));
    m.def("set_distance", &set_distance, py::arg("a"), py::arg("b"));
    m.def("hausdorff", &hausdorff, py::arg("a"), py::arg("b"));
    m.def("sup_deviation", &sup_deviation, py::arg("a"), py::arg("b"));
    m.def("diameter", &diameter, py::arg("a"));
    m.def("sample", &sample, py::arg("a"), py::arg("n"), py::arg("seed"),
          "Deterministic member samples of a region");

    m.def(
        "run_scenario_text",
        [](const std::string& text, std::optional<double> tol,
           std::optional<std::size_t> max_steps, std::optional<std::uint64_t> seed,
           bool parallel) {
            Scenario scenario = parse_scenario(text);
            return artifacts_to_dict(
                run_scenario(scenario, make_overrides(tol, max_steps, seed, parallel)));
        },
        py::arg("text"), py::arg("tol") = py::none(), py::arg("max_steps") = py::none(),
        py::arg("seed") = py::none(), py::arg("parallel") = false,
        "Parse and run a scenario document; returns report text, machine JSON and traces");

    m.def(
        "run_scenario_file",
        [](const std::filesystem::path& path, std::optional<double> tol,
           std::optional<std::size_t> max_steps, std::optional<std::uint64_t> seed,
           bool parallel) {
            Scenario scenario = load_scenario(path);
            return artifacts_to_dict(
                run_scenario(scenario, make_overrides(tol, max_steps, seed, parallel)));
        },
        py::arg("path"), py::arg("tol") = py::none(), py::arg("max_steps") = py::none(),
        py::arg("seed") = py::none(), py::arg("parallel") = false);

    m.def(
        "check_scenario_file",
        [](const std::filesystem::path& path) {
            Scenario scenario = load_scenario(path);
            CheckResults checks = check_scenario(scenario);
            py::dict out;
            out["containment"] = std::string(to_string(checks.containment.verdict));
            out["contraction"] = std::string(to_string(checks.contraction.verdict));
            out["contraction_min_slack"] = checks.contraction.min_slack;
            out["assumption3"] = std::string(to_string(checks.assumption3.verdict));
            out["assumption4"] = std::string(to_string(checks.assumption4.verdict));
            out["assumption5"] = std::string(to_string(checks.assumption5.verdict));
            out["intersecting"] = checks.intersecting;
            out["all_required_pass"] = required_checks_pass(checks);
            return out;
        },
        py::arg("path"), "Assumption verdicts for a scenario file");

    m.def(
        "canonical_scenario_json",
        [](const std::string& text) { return canonical_scenario_json(parse_scenario(text)); },
        py::arg("text"), "Round-trip a scenario document into canonical form");
}
