#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "immigrate/serialize.hpp"

namespace py = pybind11;
using namespace immigrate;

void bind_serialize(py::module_& m) {
  py::class_<ModelBundle>(m, "ModelBundle")
      .def(py::init<>())
      .def_readwrite("model", &ModelBundle::model)
      .def_readwrite("standardization", &ModelBundle::standardization);

  m.def("save_model", &save_model, py::arg("bundle"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));
  m.def("predict_bundle",
        py::overload_cast<const ModelBundle&, const Eigen::RowVectorXd&>(
            &predict_bundle),
        py::arg("bundle"), py::arg("x"));
  m.def("predict_bundle",
        py::overload_cast<const ModelBundle&, const Eigen::MatrixXd&>(
            &predict_bundle),
        py::arg("bundle"), py::arg("queries"));
  m.def("bundle_feature_names", &bundle_feature_names, py::arg("bundle"));
}
