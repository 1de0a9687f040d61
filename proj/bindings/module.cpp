#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "moreas/agents.hpp"
#include "moreas/beliefs.hpp"
#include "moreas/cli.hpp"
#include "moreas/inference.hpp"
#include "moreas/mathutil.hpp"
#include "moreas/protocol.hpp"
#include "moreas/rng.hpp"
#include "moreas/simulator.hpp"

namespace py = pybind11;
using namespace moreas;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Motivated-reasoning protocol simulator and estimator (C++ core)";
    m.attr("__version__") = kToolVersion;

    py::enum_<SourceKind>(m, "SourceKind")
        .value("TRUE_NEWS", SourceKind::TrueNews)
        .value("FAKE_NEWS", SourceKind::FakeNews);
    py::enum_<MessageDirection>(m, "MessageDirection")
        .value("GREATER_THAN", MessageDirection::GreaterThan)
        .value("LESS_THAN", MessageDirection::LessThan);

    py::class_<BeliefDist>(m, "BeliefDist")
        .def(py::init<double, double>(), py::arg("median"), py::arg("iqr"))
        .def_property_readonly("median", &BeliefDist::median)
        .def_property_readonly("iqr", &BeliefDist::iqr)
        .def_property_readonly("sd", &BeliefDist::sd)
        .def("quantile", &BeliefDist::quantile, py::arg("q"))
        .def("cdf", &BeliefDist::cdf, py::arg("x"))
        .def("conditional_range", &BeliefDist::conditional_range)
        .def("revise_median", &BeliefDist::revise_median, py::arg("message"), py::arg("assessment"));

    m.def("score_guess", &score_guess, py::arg("guess"), py::arg("theta"));
    m.def(
        "score_bounds",
        [](double lb, double ub, double theta) {
            const BoundsScore s = score_bounds(lb, ub, theta);
            return py::make_tuple(s.lower, s.upper);
        },
        py::arg("lower"), py::arg("upper"), py::arg("theta"));
    m.def("score_assessment", &score_assessment, py::arg("assessment"), py::arg("source"));
    m.def("points_to_bonus_prob", &points_to_bonus_prob, py::arg("mean_points"));
    m.def(
        "run_bdm",
        [](double valuation, double draw) {
            const BdmOutcome out = run_bdm_with_draw(valuation, draw);
            return py::make_tuple(out.revealed, out.bonus);
        },
        py::arg("valuation"), py::arg("draw"));
    m.def("classify_follow", &classify_follow, py::arg("guess"), py::arg("second_guess"),
          py::arg("message"));
    m.def("classify_polarizing", &classify_polarizing, py::arg("guess"), py::arg("population_mean"),
          py::arg("message"));
    m.def("grid_round", &grid_round, py::arg("p"));
    m.def("clamp_logit", &clamp_logit, py::arg("assessment"));
    m.def("winsorize", &winsorize, py::arg("values"), py::arg("level") = 0.05);
    m.def("conditional_range_factor", &conditional_range_factor);

    m.def(
        "simulate",
        [](const std::string& config_path, std::optional<std::uint64_t> seed,
           const std::string& out_dir) {
            SimulateOptions opts{config_path, seed, out_dir};
            return run_simulate(opts);
        },
        py::arg("config_path"), py::arg("seed"), py::arg("out_dir"),
        "Run the simulate pipeline; returns the process exit code.");
    m.def(
        "estimate",
        [](const std::string& in_dir, const std::string& out_dir, bool use_logit) {
            EstimateOptions opts{in_dir, out_dir, use_logit};
            return run_estimate(opts);
        },
        py::arg("in_dir"), py::arg("out_dir"), py::arg("use_logit") = false,
        "Run the structural estimation pipeline; returns the process exit code.");
    m.def(
        "report",
        [](const std::string& in_dir, const std::string& out_dir, bool svg) {
            ReportOptions opts{in_dir, out_dir, svg};
            return run_report(opts);
        },
        py::arg("in_dir"), py::arg("out_dir"), py::arg("svg") = false,
        "Emit figure-series CSVs (and optional SVGs); returns the process exit code.");
}
