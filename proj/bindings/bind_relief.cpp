#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "immigrate/relief.hpp"

namespace py = pybind11;
using namespace immigrate;

void bind_relief(py::module_& m) {
  py::class_<FeatureWeights>(m, "FeatureWeights")
      .def(py::init<>())
      .def_readwrite("w", &FeatureWeights::w)
      .def_readwrite("normalized", &FeatureWeights::normalized);

  m.def("nearest_hit", &nearest_hit, py::arg("data"), py::arg("n"));
  m.def("nearest_miss", &nearest_miss, py::arg("data"), py::arg("n"));
  m.def("relief_iterative", &relief_iterative, py::arg("data"), py::arg("m"),
        py::arg("seed"));
  m.def("relief_margin_accumulator", &relief_margin_accumulator,
        py::arg("data"));
  m.def("truncate_and_normalize", &truncate_and_normalize, py::arg("u"));
  m.def("relief_closed_form", &relief_closed_form, py::arg("data"));
}
