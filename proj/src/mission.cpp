#include "paraplan/mission.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace paraplan {

void Mission::validate() const {
  if (waypoints.empty()) {
    throw std::invalid_argument("mission needs at least one waypoint");
  }
  if (!(range_field.ahead > 0 && range_field.behind >= 0 &&
        range_field.half_width > 0)) {
    throw std::invalid_argument("range field dimensions out of range");
  }
  if (!(time_limit >= 0)) {
    throw std::invalid_argument("time limit must be non-negative");
  }
}

std::vector<ObstaclePoint> sense(const Mission& mission, const VehicleState& ev,
                                 int t, int n_obst_pts, double T_s) {
  const Pose2 anchor{ev.x, ev.y, ev.phi};
  std::vector<ObstaclePoint> visible;
  visible.reserve(mission.static_points.size() + mission.dynamic_points.size());

  auto admit = [&](const ObstaclePoint& world) {
    const Vec2 e = to_ev_frame(anchor, {world.x, world.y});
    if (e.x < -mission.range_field.behind || e.x > mission.range_field.ahead ||
        std::abs(e.y) > mission.range_field.half_width) {
      return;
    }
    visible.push_back({e.x, e.y, world.heading - ev.phi, world.speed});
  };

  for (const ObstaclePoint& p : mission.static_points) admit(p);
  for (ObstaclePoint p : mission.dynamic_points) {
    const double travelled = t * T_s * p.speed;
    p.x += travelled * std::cos(p.heading);
    p.y += travelled * std::sin(p.heading);
    admit(p);
  }

  if (static_cast<int>(visible.size()) > n_obst_pts) {
    // Nearest-first; stable sort keeps insertion order on exact ties.
    std::stable_sort(visible.begin(), visible.end(),
                     [](const ObstaclePoint& a, const ObstaclePoint& b) {
                       return a.x * a.x + a.y * a.y < b.x * b.x + b.y * b.y;
                     });
    visible.resize(n_obst_pts);
  }
  return visible;
}

namespace {

// Positional tolerances are applied in the waypoint's own frame, matching the
// rollout goal test, so the planner and the completion check agree.
bool waypoint_satisfied(const GoalSetpoint& g, const VehicleState& ev,
                        const GoalTolerance& tol) {
  const Vec2 e = to_ev_frame({g.x, g.y, g.phi}, {ev.x, ev.y});
  return std::abs(e.x) <= tol.eps_xi && std::abs(e.y) <= tol.eps_eta &&
         std::abs(wrap_angle(g.phi - ev.phi)) <= tol.eps_phi &&
         std::abs(g.v - ev.v) <= tol.eps_v;
}

}  // namespace

GoalSelection select_goal(const Mission& mission, const VehicleState& ev,
                          int waypoint_idx, const GoalTolerance& tol) {
  const int count = static_cast<int>(mission.waypoints.size());
  int idx = waypoint_idx;
  while (idx < count && waypoint_satisfied(mission.waypoints[idx], ev, tol)) {
    ++idx;
  }
  if (idx >= count) {
    return {mission.waypoints.back(), count - 1, true};
  }

  GoalSetpoint goal = mission.waypoints[idx];
  const Pose2 anchor{ev.x, ev.y, ev.phi};
  const Vec2 e = to_ev_frame(anchor, {goal.x, goal.y});
  double scale = 1.0;
  if (e.x > mission.range_field.ahead) {
    scale = std::min(scale, mission.range_field.ahead / e.x);
  }
  if (e.x < -mission.range_field.behind) {
    scale = std::min(scale, -mission.range_field.behind / e.x);
  }
  if (std::abs(e.y) > mission.range_field.half_width) {
    scale = std::min(scale, mission.range_field.half_width / std::abs(e.y));
  }
  if (scale < 1.0) {
    const Vec2 clipped = from_ev_frame(anchor, {e.x * scale, e.y * scale});
    goal.x = clipped.x;
    goal.y = clipped.y;
  }
  return {goal, idx, false};
}

SimulationLog run_mission(const Mission& mission, const PlannerConfig& cfg,
                          const MlpArchitecture& arch, std::uint64_t seed,
                          const VehicleParams& params,
                          const NormConstants& norm) {
  mission.validate();
  PlannerConfig run_cfg = cfg;
  run_cfg.master_seed = seed;
  const Planner planner(params, arch, run_cfg, norm);

  SimulationLog log;
  VehicleState state = mission.initial_state;
  ActuatorState actuator;
  ControlAction prev_action{0.0, idle_longitudinal(params)};
  std::vector<double> warm_theta(planner.param_count(), 0.0);
  int waypoint_idx = 0;
  bool last_success = true;
  const int max_ticks =
      static_cast<int>(std::floor(mission.time_limit / params.T_s + 1e-9));

  for (int t = 0;; ++t) {
    const GoalSelection sel = select_goal(mission, state, waypoint_idx, run_cfg.tol);
    waypoint_idx = sel.waypoint_idx;

    if (sel.mission_complete || t >= max_ticks) {
      log.records.push_back({t, state, prev_action, actuator.delta,
                             last_success, waypoint_idx, 0, 0.0});
      log.completed = sel.mission_complete;
      break;
    }

    const std::vector<ObstaclePoint> points =
        sense(mission, state, t, run_cfg.n_obst_pts, params.T_s);

    PlanningSnapshot snap;
    snap.ev_state = state;
    snap.actuator = actuator;
    snap.prev_action = prev_action;
    snap.goal = sel.goal;
    snap.obstacle_field = extrapolate(points, run_cfg.H, params.T_s,
                                      {state.x, state.y, state.phi});
    snap.warm_theta = warm_theta;

    const Vec2 goal_pos = to_ev_frame({state.x, state.y, state.phi},
                                      {sel.goal.x, sel.goal.y});
    const FeatureVector features = build_features(
        {0.0, 0.0, 0.0, state.v},
        {goal_pos.x, goal_pos.y, sel.goal.phi - state.phi, sel.goal.v},
        prev_action.a0, norm);
    for (int i = 0; i < 4; ++i) {
      log.max_abs_feature[i] =
          std::max(log.max_abs_feature[i], std::abs(features[i]));
    }

    const auto t0 = std::chrono::steady_clock::now();
    const PlannerOutput out = planner.plan_step(snap, static_cast<std::uint64_t>(t));
    const double plan_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const Controls u = map_controls(out.action, actuator, params);
    log.records.push_back({t, state, out.action, u.delta, out.success,
                           waypoint_idx, out.evaluated, plan_time});

    state = step(state, u.delta, u.u_v, params);
    actuator.delta = u.delta;
    prev_action = out.action;
    last_success = out.success;
    if (out.success) warm_theta = out.best_theta;
  }

  log.stats = stats(log);
  return log;
}

MissionStats stats(const SimulationLog& log) {
  if (log.records.empty()) {
    throw std::invalid_argument("cannot summarize an empty log");
  }
  MissionStats out;
  out.completed = log.completed;

  double v_min = log.records.front().state.v;
  double v_max = v_min;
  double v_sum = 0.0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const VehicleState& z = log.records[i].state;
    v_min = std::min(v_min, z.v);
    v_max = std::max(v_max, z.v);
    v_sum += z.v;
    out.y_abs_max = std::max(out.y_abs_max, std::abs(z.y));
    if (i > 0) {
      const double dx = z.x - log.records[i - 1].state.x;
      const double dy = z.y - log.records[i - 1].state.y;
      out.path_length += std::sqrt(dx * dx + dy * dy);
    }
  }
  out.v_min_kmh = v_min * 3.6;
  out.v_max_kmh = v_max * 3.6;
  out.v_avg_kmh = v_sum / static_cast<double>(log.records.size()) * 3.6;

  double tau_sum = 0.0;
  int planned = 0;
  for (const TickRecord& rec : log.records) {
    if (rec.evaluated > 0) {
      tau_sum += rec.plan_time;
      ++planned;
    }
  }
  out.ticks = planned;
  out.tau_avg = planned > 0 ? tau_sum / planned : 0.0;
  return out;
}

}  // namespace paraplan
