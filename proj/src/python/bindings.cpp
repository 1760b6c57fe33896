#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "paraplan/mission.hpp"
#include "paraplan/planner.hpp"
#include "paraplan/scenario.hpp"
#include "paraplan/selfcheck.hpp"

namespace py = pybind11;
using namespace paraplan;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online sampling in controller parameter space for vehicle motion planning";

  py::class_<VehicleParams>(m, "VehicleParams")
      .def(py::init<>())
      .def_readwrite("l_f", &VehicleParams::l_f)
      .def_readwrite("l_r", &VehicleParams::l_r)
      .def_readwrite("delta_max", &VehicleParams::delta_max)
      .def_readwrite("delta_rate_max", &VehicleParams::delta_rate_max)
      .def_readwrite("u_v_min", &VehicleParams::u_v_min)
      .def_readwrite("u_v_max", &VehicleParams::u_v_max)
      .def_readwrite("overhang_front", &VehicleParams::overhang_front)
      .def_readwrite("overhang_rear", &VehicleParams::overhang_rear)
      .def_readwrite("half_width", &VehicleParams::half_width)
      .def_readwrite("T_s", &VehicleParams::T_s)
      .def("validate", &VehicleParams::validate);

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<>())
      .def(py::init([](double x, double y, double phi, double v) {
             return VehicleState{x, y, phi, v};
           }),
           py::arg("x"), py::arg("y"), py::arg("phi"), py::arg("v"))
      .def_readwrite("x", &VehicleState::x)
      .def_readwrite("y", &VehicleState::y)
      .def_readwrite("phi", &VehicleState::phi)
      .def_readwrite("v", &VehicleState::v);

  py::class_<ControlAction>(m, "ControlAction")
      .def(py::init<>())
      .def(py::init([](double a0, double a1) { return ControlAction{a0, a1}; }),
           py::arg("a0"), py::arg("a1"))
      .def_readwrite("a0", &ControlAction::a0)
      .def_readwrite("a1", &ControlAction::a1);

  py::class_<ActuatorState>(m, "ActuatorState")
      .def(py::init<>())
      .def(py::init([](double delta) { return ActuatorState{delta}; }),
           py::arg("delta"))
      .def_readwrite("delta", &ActuatorState::delta);

  py::class_<Controls>(m, "Controls")
      .def_readonly("delta", &Controls::delta)
      .def_readonly("u_v", &Controls::u_v);

  m.def("map_controls", &map_controls, py::arg("action"), py::arg("actuator"),
        py::arg("params") = VehicleParams{});
  m.def("step", &step, py::arg("state"), py::arg("delta"), py::arg("u_v"),
        py::arg("params") = VehicleParams{});
  m.def("idle_longitudinal", &idle_longitudinal,
        py::arg("params") = VehicleParams{});

  py::class_<Vec2>(m, "Vec2")
      .def(py::init([](double x, double y) { return Vec2{x, y}; }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y);

  py::class_<Pose2>(m, "Pose2")
      .def(py::init([](double x, double y, double phi) {
             return Pose2{x, y, phi};
           }),
           py::arg("x"), py::arg("y"), py::arg("phi"))
      .def_readwrite("x", &Pose2::x)
      .def_readwrite("y", &Pose2::y)
      .def_readwrite("phi", &Pose2::phi);

  py::class_<ObstaclePoint>(m, "ObstaclePoint")
      .def(py::init<>())
      .def(py::init([](double x, double y, double heading, double speed) {
             return ObstaclePoint{x, y, heading, speed};
           }),
           py::arg("x"), py::arg("y"), py::arg("heading"), py::arg("speed"))
      .def_readwrite("x", &ObstaclePoint::x)
      .def_readwrite("y", &ObstaclePoint::y)
      .def_readwrite("heading", &ObstaclePoint::heading)
      .def_readwrite("speed", &ObstaclePoint::speed);

  m.def("wrap_angle", &wrap_angle);
  m.def("to_ev_frame", &to_ev_frame);
  m.def("from_ev_frame", &from_ev_frame);

  py::class_<ExtrapolatedField>(m, "ExtrapolatedField")
      .def_readonly("H", &ExtrapolatedField::H)
      .def_readonly("n_points", &ExtrapolatedField::n_points)
      .def_readonly("T_s", &ExtrapolatedField::T_s)
      .def("at", [](const ExtrapolatedField& f, int h) {
        std::vector<Vec2> out;
        for (const Vec2& p : f.at(h)) out.push_back(p);
        return out;
      });

  m.def(
      "extrapolate",
      [](const std::vector<ObstaclePoint>& pts, int H, double T_s,
         const Pose2& anchor) { return extrapolate(pts, H, T_s, anchor); },
      py::arg("points"), py::arg("H"), py::arg("T_s") = 0.1,
      py::arg("anchor") = Pose2{});

  m.def(
      "collision",
      [](const Pose2& pose, const std::vector<Vec2>& pts,
         const VehicleParams& p) { return collision(pose, pts, p); },
      py::arg("pose"), py::arg("points"), py::arg("params") = VehicleParams{});

  py::class_<GoalSetpoint>(m, "GoalSetpoint")
      .def(py::init<>())
      .def(py::init([](double x, double y, double phi, double v) {
             return GoalSetpoint{x, y, phi, v};
           }),
           py::arg("x"), py::arg("y"), py::arg("phi"), py::arg("v"))
      .def_readwrite("x", &GoalSetpoint::x)
      .def_readwrite("y", &GoalSetpoint::y)
      .def_readwrite("phi", &GoalSetpoint::phi)
      .def_readwrite("v", &GoalSetpoint::v);

  py::class_<MlpArchitecture>(m, "MlpArchitecture")
      .def(py::init<>())
      .def(py::init([](std::vector<int> sizes) {
             MlpArchitecture a{std::move(sizes)};
             a.validate();
             return a;
           }),
           py::arg("layer_sizes"))
      .def_readwrite("layer_sizes", &MlpArchitecture::layer_sizes);

  m.def("param_count", &param_count);

  py::class_<NormConstants>(m, "NormConstants")
      .def(py::init<>())
      .def_readwrite("d_xi", &NormConstants::d_xi)
      .def_readwrite("d_eta", &NormConstants::d_eta)
      .def_readwrite("d_phi", &NormConstants::d_phi)
      .def_readwrite("d_v", &NormConstants::d_v);

  m.def("build_features", &build_features, py::arg("ev_in_anchor"),
        py::arg("goal_in_anchor"), py::arg("prev_a0"),
        py::arg("norm") = NormConstants{});

  py::class_<MlpPolicy>(m, "MlpPolicy")
      .def(py::init<MlpArchitecture>())
      .def_property_readonly("param_count", &MlpPolicy::param_count)
      .def("forward",
           [](const MlpPolicy& p, const std::vector<double>& theta,
              const FeatureVector& s) { return p.forward(theta, s); });

  py::class_<GoalTolerance>(m, "GoalTolerance")
      .def(py::init<>())
      .def_readwrite("eps_xi", &GoalTolerance::eps_xi)
      .def_readwrite("eps_eta", &GoalTolerance::eps_eta)
      .def_readwrite("eps_phi", &GoalTolerance::eps_phi)
      .def_readwrite("eps_v", &GoalTolerance::eps_v);

  py::class_<PlannerConfig>(m, "PlannerConfig")
      .def(py::init<>())
      .def_readwrite("H", &PlannerConfig::H)
      .def_readwrite("n_restarts", &PlannerConfig::n_restarts)
      .def_readwrite("n_iter_max", &PlannerConfig::n_iter_max)
      .def_readwrite("n_candidates", &PlannerConfig::n_candidates)
      .def_readwrite("n_obst_pts", &PlannerConfig::n_obst_pts)
      .def_readwrite("tol", &PlannerConfig::tol)
      .def_readwrite("sigma_log_low", &PlannerConfig::sigma_log_low)
      .def_readwrite("sigma_log_high", &PlannerConfig::sigma_log_high)
      .def_readwrite("master_seed", &PlannerConfig::master_seed)
      .def_readwrite("early_exit", &PlannerConfig::early_exit)
      .def_readwrite("threads", &PlannerConfig::threads);

  py::class_<PlanningSnapshot>(m, "PlanningSnapshot")
      .def(py::init<>())
      .def_readwrite("ev_state", &PlanningSnapshot::ev_state)
      .def_readwrite("actuator", &PlanningSnapshot::actuator)
      .def_readwrite("prev_action", &PlanningSnapshot::prev_action)
      .def_readwrite("goal", &PlanningSnapshot::goal)
      .def_readwrite("obstacle_field", &PlanningSnapshot::obstacle_field)
      .def_readwrite("warm_theta", &PlanningSnapshot::warm_theta);

  py::class_<RolloutResult>(m, "RolloutResult")
      .def_readonly("reached", &RolloutResult::reached)
      .def_readonly("t_goal", &RolloutResult::t_goal)
      .def_readonly("collided", &RolloutResult::collided)
      .def_readonly("path_length", &RolloutResult::path_length)
      .def_readonly("terminal_cost", &RolloutResult::terminal_cost)
      .def_readonly("first_action", &RolloutResult::first_action)
      .def_readonly("trajectory", &RolloutResult::trajectory);

  py::class_<PlannerOutput>(m, "PlannerOutput")
      .def_readonly("best_theta", &PlannerOutput::best_theta)
      .def_readonly("action", &PlannerOutput::action)
      .def_readonly("predicted", &PlannerOutput::predicted)
      .def_readonly("success", &PlannerOutput::success)
      .def_readonly("evaluated", &PlannerOutput::evaluated);

  py::class_<Planner>(m, "Planner")
      .def(py::init<const VehicleParams&, const MlpArchitecture&,
                    const PlannerConfig&, const NormConstants&>(),
           py::arg("params"), py::arg("arch"), py::arg("config"),
           py::arg("norm") = NormConstants{})
      .def("plan_step", &Planner::plan_step, py::arg("snapshot"), py::arg("t"),
           py::call_guard<py::gil_scoped_release>())
      .def("rollout",
           [](const Planner& p, const std::vector<double>& theta,
              const PlanningSnapshot& snap) { return p.rollout(theta, snap); })
      .def_property_readonly("param_count", &Planner::param_count);

  py::class_<RangeField>(m, "RangeField")
      .def(py::init<>())
      .def_readwrite("ahead", &RangeField::ahead)
      .def_readwrite("behind", &RangeField::behind)
      .def_readwrite("half_width", &RangeField::half_width);

  py::class_<Mission>(m, "Mission")
      .def(py::init<>())
      .def_readwrite("name", &Mission::name)
      .def_readwrite("initial_state", &Mission::initial_state)
      .def_readwrite("waypoints", &Mission::waypoints)
      .def_readwrite("static_points", &Mission::static_points)
      .def_readwrite("dynamic_points", &Mission::dynamic_points)
      .def_readwrite("range_field", &Mission::range_field)
      .def_readwrite("time_limit", &Mission::time_limit);

  py::class_<TickRecord>(m, "TickRecord")
      .def_readonly("t", &TickRecord::t)
      .def_readonly("state", &TickRecord::state)
      .def_readonly("action", &TickRecord::action)
      .def_readonly("delta", &TickRecord::delta)
      .def_readonly("planner_success", &TickRecord::planner_success)
      .def_readonly("waypoint_idx", &TickRecord::waypoint_idx)
      .def_readonly("evaluated", &TickRecord::evaluated)
      .def_readonly("plan_time", &TickRecord::plan_time);

  py::class_<MissionStats>(m, "MissionStats")
      .def_readonly("path_length", &MissionStats::path_length)
      .def_readonly("v_min_kmh", &MissionStats::v_min_kmh)
      .def_readonly("v_avg_kmh", &MissionStats::v_avg_kmh)
      .def_readonly("v_max_kmh", &MissionStats::v_max_kmh)
      .def_readonly("y_abs_max", &MissionStats::y_abs_max)
      .def_readonly("tau_avg", &MissionStats::tau_avg)
      .def_readonly("completed", &MissionStats::completed)
      .def_readonly("ticks", &MissionStats::ticks);

  py::class_<SimulationLog>(m, "SimulationLog")
      .def_readonly("records", &SimulationLog::records)
      .def_readonly("completed", &SimulationLog::completed)
      .def_readonly("stats", &SimulationLog::stats)
      .def_readonly("max_abs_feature", &SimulationLog::max_abs_feature);

  m.def("sense", &sense, py::arg("mission"), py::arg("ev"), py::arg("t"),
        py::arg("n_obst_pts"), py::arg("T_s") = 0.1);

  py::class_<GoalSelection>(m, "GoalSelection")
      .def_readonly("goal", &GoalSelection::goal)
      .def_readonly("waypoint_idx", &GoalSelection::waypoint_idx)
      .def_readonly("mission_complete", &GoalSelection::mission_complete);

  m.def("select_goal", &select_goal, py::arg("mission"), py::arg("ev"),
        py::arg("waypoint_idx"), py::arg("tol") = GoalTolerance{});

  m.def("run_mission", &run_mission, py::arg("mission"), py::arg("config"),
        py::arg("arch"), py::arg("seed"), py::arg("params") = VehicleParams{},
        py::arg("norm") = NormConstants{},
        py::call_guard<py::gil_scoped_release>());
  m.def("stats", &stats);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init<>())
      .def_readwrite("name", &ScenarioSpec::name)
      .def_readwrite("mission", &ScenarioSpec::mission)
      .def_readwrite("planner", &ScenarioSpec::planner)
      .def_readwrite("norm", &ScenarioSpec::norm)
      .def_readwrite("arch", &ScenarioSpec::arch)
      .def_readwrite("seeds", &ScenarioSpec::seeds);

  py::class_<SeedResult>(m, "SeedResult")
      .def_readonly("seed", &SeedResult::seed)
      .def_readonly("stats", &SeedResult::stats);

  py::class_<Aggregate>(m, "Aggregate")
      .def_readonly("min", &Aggregate::min)
      .def_readonly("avg", &Aggregate::avg)
      .def_readonly("max", &Aggregate::max);

  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("scenario", &SweepReport::scenario)
      .def_readonly("per_seed", &SweepReport::per_seed)
      .def_readonly("path_length_m", &SweepReport::path_length_m)
      .def_readonly("v_kmh", &SweepReport::v_kmh)
      .def_readonly("tau_s", &SweepReport::tau_s)
      .def_readonly("success_count", &SweepReport::success_count);

  m.def("builtin_scenario_names", &builtin_scenario_names);
  m.def("builtin_scenario", &builtin_scenario);
  m.def("load_scenario", &load_scenario);
  m.def("save_scenario", &save_scenario);
  m.def("run_sweep", &run_sweep, py::arg("spec"), py::arg("out_dir"),
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  py::register_exception<UsageError>(m, "UsageError");
}
