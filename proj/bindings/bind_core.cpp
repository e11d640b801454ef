#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "immigrate/core.hpp"
#include "immigrate/rng.hpp"

namespace py = pybind11;
using namespace immigrate;

void bind_core(py::module_& m) {
  py::register_exception<DegenerateUpdate>(m, "DegenerateUpdateError");

  py::class_<WeightMatrix>(m, "WeightMatrix")
      .def(py::init<>())
      .def(py::init([](const Eigen::MatrixXd& w) {
             WeightMatrix wm;
             wm.W = w;
             return wm;
           }),
           py::arg("W"))
      .def_readwrite("W", &WeightMatrix::W)
      .def("asymmetry", &WeightMatrix::asymmetry)
      .def("frobenius", &WeightMatrix::frobenius)
      .def("min_entry", &WeightMatrix::min_entry)
      .def("min_eigenvalue", &WeightMatrix::min_eigenvalue);

  m.def("uniform_diagonal_weights", &uniform_diagonal_weights,
        py::arg("n_features"));
  m.def(
      "random_weights",
      [](Eigen::Index n_features, std::uint64_t seed) {
        Rng rng(seed);
        return random_weights(n_features, rng);
      },
      py::arg("n_features"), py::arg("seed"));

  py::class_<NeighborWeights>(m, "NeighborWeights")
      .def_readonly("alpha", &NeighborWeights::alpha)
      .def_readonly("beta", &NeighborWeights::beta);

  py::class_<Hyperparameters>(m, "Hyperparameters")
      .def(py::init<>())
      .def_readwrite("sigma", &Hyperparameters::sigma)
      .def_readwrite("max_iterations", &Hyperparameters::max_iterations)
      .def_readwrite("cost_tolerance", &Hyperparameters::cost_tolerance)
      .def_readwrite("prune_enabled", &Hyperparameters::prune_enabled)
      .def_readwrite("prune_threshold", &Hyperparameters::prune_threshold)
      .def_readwrite("seed", &Hyperparameters::seed);

  py::class_<TrainDiagnostics>(m, "TrainDiagnostics")
      .def_readonly("iterations", &TrainDiagnostics::iterations)
      .def_readonly("final_cost", &TrainDiagnostics::final_cost)
      .def_readonly("cost_history", &TrainDiagnostics::cost_history)
      .def_readonly("degenerate_stop", &TrainDiagnostics::degenerate_stop);

  py::class_<ImmigrateModel>(m, "ImmigrateModel")
      .def(py::init<>())
      .def_readwrite("weights", &ImmigrateModel::weights)
      .def_readwrite("sigma", &ImmigrateModel::sigma)
      .def_readwrite("training_data", &ImmigrateModel::training_data)
      .def_readwrite("class_ids", &ImmigrateModel::class_ids)
      .def_readonly("diagnostics", &ImmigrateModel::diagnostics);

  m.def("hit_indices", &hit_indices, py::arg("data"), py::arg("n"));
  m.def("miss_indices", &miss_indices, py::arg("data"), py::arg("n"));
  m.def("quadratic_manhattan", &quadratic_manhattan, py::arg("x_i"),
        py::arg("x_j"), py::arg("weights"));
  m.def("update_neighbor_weights", &update_neighbor_weights, py::arg("data"),
        py::arg("weights"), py::arg("sigma"));
  m.def("hit_entropy", &hit_entropy, py::arg("neighbor_weights"), py::arg("n"));
  m.def("miss_entropy", &miss_entropy, py::arg("neighbor_weights"),
        py::arg("n"));
  m.def("cost", &cost, py::arg("data"), py::arg("weights"),
        py::arg("neighbor_weights"), py::arg("sigma"),
        py::arg("instance_weights") = std::nullopt);
  m.def("scatter_matrix", &scatter_matrix, py::arg("data"),
        py::arg("neighbor_weights"), py::arg("instance_weights") = std::nullopt);
  m.def("update_weight_matrix", &update_weight_matrix,
        py::arg("scatter"));
  m.def("prune", &prune, py::arg("weights"), py::arg("threshold"));

  m.def(
      "train",
      [](const Dataset& data, const Hyperparameters& hp,
         const std::optional<Eigen::VectorXd>& instance_weights,
         const std::optional<WeightMatrix>& initial_weights) {
        TrainOptions options;
        options.instance_weights = instance_weights;
        options.initial_weights = initial_weights;
        return train(data, hp, options);
      },
      py::arg("data"), py::arg("hp") = Hyperparameters{},
      py::arg("instance_weights") = std::nullopt,
      py::arg("initial_weights") = std::nullopt);

  m.def("predict",
        py::overload_cast<const ImmigrateModel&, const Eigen::RowVectorXd&>(
            &predict),
        py::arg("model"), py::arg("x"));
  m.def("predict",
        py::overload_cast<const ImmigrateModel&, const Eigen::MatrixXd&>(
            &predict),
        py::arg("model"), py::arg("queries"));

  m.def("sigma_grid", &sigma_grid);
  m.def("tune_sigma", &tune_sigma, py::arg("data"), py::arg("hp_base"),
        py::arg("inner_folds"));
}
