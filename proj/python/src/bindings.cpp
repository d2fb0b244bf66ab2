#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "etaik/errors.hpp"
#include "etaik/kinematics.hpp"
#include "etaik/mlp.hpp"
#include "etaik/report_io.hpp"
#include "etaik/scene_io.hpp"
#include "etaik/solver.hpp"
#include "etaik/timing.hpp"

namespace py = pybind11;
using namespace etaik;

namespace {

py::dict candidate_dict(const Candidate& c) {
  py::dict d;
  d["q"] = c.q;
  d["position_error"] = c.position_error;
  d["orientation_error"] = c.orientation_error;
  d["predicted_time"] = c.predicted_time;
  d["cost"] = c.cost.total;
  d["converged"] = c.converged;
  d["collision_free"] = c.collision_free;
  d["feasible"] = c.feasible;
  return d;
}

Quat quat_from(const std::vector<double>& wxyz) {
  if (wxyz.size() != 4) throw ContractViolation("quaternion must have 4 entries (w, x, y, z)");
  return quat_wxyz(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Execution-time-aware dual-arm inverse kinematics";

  static py::exception<ContractViolation> contract(m, "ContractViolation", PyExc_ValueError);
  static py::exception<FormatError> format(m, "FormatError", PyExc_ValueError);
  static py::exception<NoSolution> no_solution(m, "NoSolution", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NoSolution& e) {
      py::set_error(no_solution, e.what());
    } catch (const ContractViolation& e) {
      py::set_error(contract, e.what());
    } catch (const FormatError& e) {
      py::set_error(format, e.what());
    }
  });

  m.def("joint_move_time", &joint_move_time, py::arg("distance"), py::arg("vel_max"), py::arg("acc_max"),
        "Rest-to-rest trapezoid time of a single joint.");

  py::class_<CollisionWorld>(m, "Scene")
      .def_static("load", &load_scene, py::arg("path"))
      .def_static("parse", &parse_scene, py::arg("text"))
      .def("to_json", &scene_to_string)
      .def_property_readonly("dof", [](const CollisionWorld& w) { return w.system().dof(); })
      .def_property_readonly("dof_a", [](const CollisionWorld& w) { return w.system().dof_a(); })
      .def_property_readonly("q_min", [](const CollisionWorld& w) { return w.system().q_min(); })
      .def_property_readonly("q_max", [](const CollisionWorld& w) { return w.system().q_max(); })
      .def("in_collision", &config_in_collision, py::arg("q"))
      .def(
          "motion_in_collision",
          [](const CollisionWorld& w, const VecX& a, const VecX& b) { return motion_in_collision(w, a, b); },
          py::arg("q_from"), py::arg("q_to"))
      .def(
          "relative_pose",
          [](const CollisionWorld& w, const VecX& q) {
            const Pose p = relative_pose(w.system(), q);
            const Quat& o = p.orientation;
            return py::make_tuple(Vec3(p.position), Eigen::Vector4d(o.w(), o.x(), o.y(), o.z()));
          },
          py::arg("q"), "Pose of TCP B in the TCP A frame as (position, quaternion wxyz).")
      .def(
          "blind_time",
          [](const CollisionWorld& w, const VecX& a, const VecX& b) { return synchronized_move_time(w, a, b).duration; },
          py::arg("q_from"), py::arg("q_to"))
      .def(
          "planned_time",
          [](const CollisionWorld& w, const VecX& a, const VecX& b, std::uint64_t seed) {
            py::gil_scoped_release release;
            return plan_collision_free(w, a, b, seed).duration;
          },
          py::arg("q_from"), py::arg("q_to"), py::arg("seed") = 0);

  py::class_<MlpModel, std::shared_ptr<MlpModel>>(m, "Model")
      .def_static("load", [](const std::string& path) { return std::make_shared<MlpModel>(load_model(path)); },
                  py::arg("path"))
      .def_readonly("dof", &MlpModel::dof)
      .def_readonly("layer_sizes", &MlpModel::layer_sizes)
      .def(
          "predict", [](const MlpModel& model, const VecX& q_0, const VecX& q_t) { return predict(model, encode(q_0, q_t)); },
          py::arg("q_0"), py::arg("q_t"), "Predicted execution time in seconds.");

  m.def(
      "solve",
      [](const CollisionWorld& world, const VecX& q_0, const Vec3& position, const std::vector<double>& quaternion,
         const std::string& config_file, std::shared_ptr<MlpModel> model, std::optional<std::uint64_t> seed,
         std::optional<int> batch_size, std::optional<int> iterations, std::optional<std::string> selection,
         std::optional<std::string> time_term) {
        SolverConfig cfg;
        if (!config_file.empty()) {
          SolverConfigFile file = load_solver_config(config_file);
          cfg = file.config;
          if (!model && !file.model_file.empty()) model = std::make_shared<MlpModel>(load_model(file.model_file));
        }
        if (model) cfg.model = model;
        if (seed) cfg.seed = *seed;
        if (batch_size) cfg.batch_size = *batch_size;
        if (iterations) cfg.iterations = *iterations;
        if (selection) cfg.selection = selection_from_string(*selection);
        if (time_term) cfg.time_term = time_term_from_string(*time_term);
        const PoseTarget target = PoseTarget::relative_to(Pose(position, quat_from(quaternion)));
        SolveReport report;
        {
          py::gil_scoped_release release;
          report = etaik::solve(world, q_0, target, cfg);
        }
        py::dict out = candidate_dict(report.best_candidate());
        out["best_index"] = report.best_index;
        out["iterations"] = report.iterations;
        return out;
      },
      py::arg("scene"), py::arg("q_0"), py::arg("position"), py::arg("quaternion") = std::vector<double>{1, 0, 0, 0},
      py::arg("config_file") = "", py::arg("model") = nullptr, py::arg("seed") = py::none(),
      py::arg("batch_size") = py::none(), py::arg("iterations") = py::none(), py::arg("selection") = py::none(),
      py::arg("time_term") = py::none(),
      "Solve for a relative TCP pose. Returns the selected candidate as a dict; raises NoSolution.");
}
