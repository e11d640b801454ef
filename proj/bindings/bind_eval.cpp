#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "immigrate/eval.hpp"

namespace py = pybind11;
using namespace immigrate;

void bind_eval(py::module_& m) {
  py::enum_<LearnerKind>(m, "LearnerKind")
      .value("majority", LearnerKind::majority)
      .value("relief", LearnerKind::relief)
      .value("immigrate", LearnerKind::immigrate)
      .value("bim", LearnerKind::bim)
      .value("im4e_immigrate", LearnerKind::im4e_immigrate)
      .value("b4g", LearnerKind::b4g);

  py::class_<LearnerSpec>(m, "LearnerSpec")
      .def(py::init<>())
      .def_readwrite("kind", &LearnerSpec::kind)
      .def_readwrite("hp", &LearnerSpec::hp)
      .def_readwrite("tune", &LearnerSpec::tune)
      .def_readwrite("boost", &LearnerSpec::boost)
      .def_readwrite("screen_threshold", &LearnerSpec::screen_threshold);

  m.def("describe", &describe, py::arg("spec"));

  py::class_<CVConfig>(m, "CVConfig")
      .def_readonly("k", &CVConfig::k)
      .def_readonly("repeats", &CVConfig::repeats)
      .def_readonly("seed", &CVConfig::seed)
      .def_readonly("learner", &CVConfig::learner);

  py::class_<CVReport>(m, "CVReport")
      .def_readonly("per_trial_accuracies", &CVReport::per_trial_accuracies)
      .def_readonly("mean", &CVReport::mean)
      .def_readonly("std_dev", &CVReport::std_dev)
      .def_readonly("config", &CVReport::config);

  py::enum_<Outcome>(m, "Outcome")
      .value("win", Outcome::win)
      .value("tie", Outcome::tie)
      .value("loss", Outcome::loss);

  py::class_<ComparisonVerdict>(m, "ComparisonVerdict")
      .def_readonly("outcome", &ComparisonVerdict::outcome)
      .def_readonly("p_equal", &ComparisonVerdict::p_equal)
      .def_readonly("p_one_sided", &ComparisonVerdict::p_one_sided);

  m.def("evaluate_split", &evaluate_split, py::arg("data"), py::arg("spec"),
        py::arg("train_rows"), py::arg("test_rows"), py::arg("seed"));
  m.def("cross_validate", &cross_validate, py::arg("data"), py::arg("spec"),
        py::arg("k"), py::arg("repeats"), py::arg("seed"));
  m.def("paired_t_test", &paired_t_test, py::arg("a"), py::arg("b"));
  m.def("export_heatmap", &export_heatmap, py::arg("weights"),
        py::arg("feature_names"), py::arg("path"));
  m.def("write_report_json", &write_report_json, py::arg("report"),
        py::arg("path"));
  m.def("read_report_json", &read_report_json, py::arg("path"));
}
