#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "immigrate/dataset.hpp"

namespace py = pybind11;
using namespace immigrate;

void bind_dataset(py::module_& m) {
  py::register_exception<Error>(m, "DataError");

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("features", &Dataset::features)
      .def_readwrite("labels", &Dataset::labels)
      .def_readwrite("feature_names", &Dataset::feature_names)
      .def_property_readonly("n_instances", &Dataset::n_instances)
      .def_property_readonly("n_features", &Dataset::n_features)
      .def_property_readonly("n_classes", &Dataset::n_classes)
      .def("class_counts", &Dataset::class_counts);

  py::class_<StandardizationParams>(m, "StandardizationParams")
      .def(py::init<>())
      .def_readwrite("means", &StandardizationParams::means)
      .def_readwrite("standard_deviations",
                     &StandardizationParams::standard_deviations)
      .def("constant", &StandardizationParams::constant);

  py::class_<FoldAssignment>(m, "FoldAssignment")
      .def_readonly("fold_index", &FoldAssignment::fold_index)
      .def_readonly("k", &FoldAssignment::k)
      .def("test_indices", &FoldAssignment::test_indices)
      .def("train_indices", &FoldAssignment::train_indices);

  m.def(
      "load_csv",
      [](const std::string& path, const py::object& label_column) {
        if (py::isinstance<py::int_>(label_column))
          return load_csv(path, label_column.cast<int>());
        return load_csv(path, label_column.cast<std::string>());
      },
      py::arg("path"), py::arg("label_column") = "label");
  m.def("write_csv", &write_csv, py::arg("data"), py::arg("path"),
        py::arg("label_name") = "label");
  m.def("standardize", &standardize, py::arg("data"));
  m.def("apply_standardization", &apply_standardization, py::arg("data"),
        py::arg("params"));
  m.def("reduce_to_top_two_classes", &reduce_to_top_two_classes, py::arg("data"));
  m.def("stratified_kfold", &stratified_kfold, py::arg("data"), py::arg("k"),
        py::arg("seed"));
  m.def("generate_synthetic", &generate_synthetic, py::arg("n_per_class"),
        py::arg("noise_fraction"), py::arg("seed"));
  m.def("subset", &subset, py::arg("data"), py::arg("rows"));
  m.def("select_features", &select_features, py::arg("data"), py::arg("columns"));
}
