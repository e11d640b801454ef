#include <pybind11/pybind11.h>

namespace py = pybind11;

void bind_dataset(py::module_& m);
void bind_relief(py::module_& m);
void bind_core(py::module_& m);
void bind_boosting(py::module_& m);
void bind_highdim(py::module_& m);
void bind_eval(py::module_& m);
void bind_serialize(py::module_& m);

PYBIND11_MODULE(_immigrate, m) {
  m.doc() = "Hypothesis-margin feature selection and classification";
  m.attr("__version__") = "0.1.0";
  bind_dataset(m);
  bind_relief(m);
  bind_core(m);
  bind_boosting(m);
  bind_highdim(m);
  bind_eval(m);
  bind_serialize(m);
}
