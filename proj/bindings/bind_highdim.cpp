#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "immigrate/highdim.hpp"

namespace py = pybind11;
using namespace immigrate;

void bind_highdim(py::module_& m) {
  py::class_<ScreenResult>(m, "ScreenResult")
      .def(py::init<>())
      .def_readwrite("kept_features", &ScreenResult::kept_features)
      .def_readwrite("diag_weights", &ScreenResult::diag_weights)
      .def_readwrite("feature_names", &ScreenResult::feature_names);

  py::class_<ScreenedModel>(m, "ScreenedModel")
      .def(py::init<>())
      .def_readwrite("model", &ScreenedModel::model)
      .def_readwrite("screen", &ScreenedModel::screen);

  py::class_<ScreenedBoostedModel>(m, "ScreenedBoostedModel")
      .def(py::init<>())
      .def_readwrite("model", &ScreenedBoostedModel::model)
      .def_readwrite("screen", &ScreenedBoostedModel::screen);

  m.def("train_diagonal", &train_diagonal, py::arg("data"), py::arg("hp"));
  m.def("prescreen", &prescreen, py::arg("diag_weights"), py::arg("threshold"),
        py::arg("include_features") = std::vector<int>{});
  m.def("train_im4e_immigrate", &train_im4e_immigrate, py::arg("data"),
        py::arg("hp"), py::arg("screen_threshold"),
        py::arg("include_features") = std::vector<int>{});
  m.def("train_b4g", &train_b4g, py::arg("data"), py::arg("options"),
        py::arg("screen_threshold"),
        py::arg("include_features") = std::vector<int>{});

  m.def("predict",
        py::overload_cast<const ScreenedModel&, const Eigen::RowVectorXd&>(
            &predict),
        py::arg("model"), py::arg("x"));
  m.def("predict",
        py::overload_cast<const ScreenedModel&, const Eigen::MatrixXd&>(
            &predict),
        py::arg("model"), py::arg("queries"));
  m.def("predict",
        py::overload_cast<const ScreenedBoostedModel&,
                          const Eigen::RowVectorXd&>(&predict),
        py::arg("model"), py::arg("x"));
  m.def("predict",
        py::overload_cast<const ScreenedBoostedModel&, const Eigen::MatrixXd&>(
            &predict),
        py::arg("model"), py::arg("queries"));
}
