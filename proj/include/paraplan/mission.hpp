#pragma once

#include <array>
#include <string>
#include <vector>

#include "paraplan/planner.hpp"

namespace paraplan {

// Rectangular sensing region around the EV, in its body frame.
struct RangeField {
  double ahead = 30.0;      // [m]
  double behind = 10.0;     // [m]
  double half_width = 10.0;  // [m]
};

struct Mission {
  std::string name;
  VehicleState initial_state;
  std::vector<GoalSetpoint> waypoints;        // at least one; last = mission goal
  std::vector<ObstaclePoint> static_points;   // world frame, speed 0
  std::vector<ObstaclePoint> dynamic_points;  // world frame at t = 0
  RangeField range_field;
  double time_limit = 60.0;  // [s] simulated

  void validate() const;
};

struct TickRecord {
  int t = 0;
  VehicleState state;      // before this tick's control is applied
  ControlAction action;    // network output applied at this tick
  double delta = 0.0;      // realized steering angle [rad]
  bool planner_success = false;
  int waypoint_idx = 0;
  std::int64_t evaluated = 0;  // rollouts sampled; 0 marks the terminal record
  double plan_time = 0.0;      // wall-clock seconds spent in plan_step
};

struct MissionStats {
  double path_length = 0.0;  // [m]
  double v_min_kmh = 0.0;
  double v_avg_kmh = 0.0;
  double v_max_kmh = 0.0;
  double y_abs_max = 0.0;  // [m]
  double tau_avg = 0.0;    // [s] mean planning wall-clock per tick
  bool completed = false;
  int ticks = 0;  // control ticks executed
};

// Per-tick closed-loop trace. The final record holds the terminal state with
// the held control values and evaluated = 0.
struct SimulationLog {
  std::vector<TickRecord> records;
  bool completed = false;
  MissionStats stats;
  std::array<double, 4> max_abs_feature{};  // tracking-error features at h=0
};

// Ground-truth sensing at tick t: dynamic points advanced under constant
// velocity, merged with static points, expressed in the EV frame, filtered to
// the range field, and capped to the nearest n_obst_pts by planar distance.
std::vector<ObstaclePoint> sense(const Mission& mission, const VehicleState& ev,
                                 int t, int n_obst_pts, double T_s);

struct GoalSelection {
  GoalSetpoint goal;  // world frame, clipped to the range field
  int waypoint_idx = 0;
  bool mission_complete = false;
};

// Advances past every waypoint the EV currently satisfies, then clips the
// active waypoint position onto the range-field boundary along the segment
// from the EV; heading and commanded velocity are kept.
GoalSelection select_goal(const Mission& mission, const VehicleState& ev,
                          int waypoint_idx, const GoalTolerance& tol);

// Runs the closed loop: sense, select goal, plan, apply one control tick,
// until the final waypoint is reached or time_limit is exceeded.
SimulationLog run_mission(const Mission& mission, const PlannerConfig& cfg,
                          const MlpArchitecture& arch, std::uint64_t seed,
                          const VehicleParams& params = {},
                          const NormConstants& norm = {});

// Recomputes the summary statistics from the per-tick records.
MissionStats stats(const SimulationLog& log);

}  // namespace paraplan
