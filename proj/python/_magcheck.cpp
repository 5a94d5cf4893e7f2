#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mag/error.hpp"
#include "mag/scenario.hpp"
#include "mag/version.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_magcheck, m) {
  m.doc() = "Bindings for the metric-affine verification harness";
  m.attr("__version__") = mag::kVersion;
  m.attr("SCHEMA_VERSION") = mag::kSchemaVersion;

  static py::exception<mag::Error> mag_error(m, "MagError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mag::Error& e) {
      py::object err = mag_error;
      py::object inst = err(e.what());
      inst.attr("code") = std::string(mag::to_string(e.code()));
      PyErr_SetObject(mag_error.ptr(), inst.ptr());
    }
  });

  m.def(
      "run_scenario_json",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::string> strategy,
         std::optional<std::size_t> points, bool include_timing) {
        mag::Scenario sc = mag::parse_scenario(text);
        if (seed) sc.seed = *seed;
        if (strategy) sc.strategy = mag::Strategy::parse(*strategy);
        if (points) sc.points = *points;
        mag::VerificationReport rep;
        {
          py::gil_scoped_release release;
          rep = mag::run_scenario(sc);
        }
        return mag::report_to_json(rep, include_timing);
      },
      py::arg("text"), py::arg("seed") = py::none(), py::arg("strategy") = py::none(),
      py::arg("points") = py::none(), py::arg("include_timing") = true,
      "Run a scenario document and return the report as JSON text.");

  m.def(
      "summary_json",
      [](const std::string& text) { return mag::report_summary(mag::run_scenario(mag::parse_scenario(text))); },
      py::arg("text"), "Run a scenario document and return the plain-text summary table.");

  m.def("catalog_json", &mag::catalog_to_json, "Catalog entries and parameters as JSON text.");

  m.def("checks", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& c : mag::registered_checks()) out.emplace_back(c.id, c.description);
    return out;
  });
}
