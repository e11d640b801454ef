#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "immigrate/boosting.hpp"

namespace py = pybind11;
using namespace immigrate;

void bind_boosting(py::module_& m) {
  py::class_<SampleWeights>(m, "SampleWeights")
      .def(py::init<>())
      .def(py::init([](const Eigen::VectorXd& d) {
             SampleWeights w;
             w.D = d;
             return w;
           }),
           py::arg("D"))
      .def_readwrite("D", &SampleWeights::D);

  py::class_<BoostRound>(m, "BoostRound")
      .def_readonly("sigma", &BoostRound::sigma)
      .def_readonly("epsilon", &BoostRound::epsilon)
      .def_readonly("vote", &BoostRound::vote)
      .def_readonly("retained", &BoostRound::retained)
      .def_readonly("post_update_error", &BoostRound::post_update_error);

  py::class_<BoostedModel>(m, "BoostedModel")
      .def(py::init<>())
      .def_readonly("learners", &BoostedModel::learners)
      .def_readonly("votes", &BoostedModel::votes)
      .def_readonly("class_ids", &BoostedModel::class_ids)
      .def_readonly("rounds", &BoostedModel::rounds);

  py::class_<BimOptions>(m, "BimOptions")
      .def(py::init<>())
      .def_readwrite("rounds", &BimOptions::rounds)
      .def_readwrite("sigma_max", &BimOptions::sigma_max)
      .def_readwrite("sigma_min", &BimOptions::sigma_min)
      .def_readwrite("weak_max_iter", &BimOptions::weak_max_iter)
      .def_readwrite("seed", &BimOptions::seed)
      .def_readwrite("initial_weights", &BimOptions::initial_weights);

  m.def("train_weak", &train_weak, py::arg("data"), py::arg("weights"),
        py::arg("sigma"), py::arg("weak_max_iter"), py::arg("seed"),
        py::arg("initial_weights") = std::nullopt);
  m.def("vote_from_error", &vote_from_error, py::arg("epsilon"));
  m.def("train_bim", &train_bim, py::arg("data"),
        py::arg("options") = BimOptions{});

  m.def("predict_bim",
        py::overload_cast<const BoostedModel&, const Eigen::RowVectorXd&>(
            &predict_bim),
        py::arg("model"), py::arg("x"));
  m.def("predict_bim",
        py::overload_cast<const BoostedModel&, const Eigen::MatrixXd&>(
            &predict_bim),
        py::arg("model"), py::arg("queries"));
}
