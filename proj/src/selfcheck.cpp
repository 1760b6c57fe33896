#include "paraplan/selfcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace paraplan {

std::optional<bool> chassis_oracle(const Pose2& pose, const Vec2& point,
                                   const VehicleParams& p, double edge_margin) {
  const double c = std::cos(pose.phi);
  const double s = std::sin(pose.phi);
  const double fe = p.front_extent();
  const double re = p.rear_extent();
  const double hw = p.half_width;
  // Chassis corners in the world frame, counterclockwise.
  const Vec2 body[4] = {{fe, -hw}, {fe, hw}, {-re, hw}, {-re, -hw}};
  Vec2 corners[4];
  for (int i = 0; i < 4; ++i) {
    corners[i] = {pose.x + c * body[i].x - s * body[i].y,
                  pose.y + s * body[i].x + c * body[i].y};
  }
  bool inside = true;
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = corners[i];
    const Vec2& b = corners[(i + 1) % 4];
    const double ex = b.x - a.x;
    const double ey = b.y - a.y;
    const double cross = ex * (point.y - a.y) - ey * (point.x - a.x);
    const double len = std::sqrt(ex * ex + ey * ey);
    if (std::abs(cross) < edge_margin * len) return std::nullopt;
    if (cross < 0.0) inside = false;
  }
  return inside;
}

RolloutResult resimulate_rollout(std::span<const double> theta,
                                 const PlanningSnapshot& snap,
                                 const Planner& planner) {
  const VehicleParams& p = planner.vehicle_params();
  const NormConstants& nc = planner.norm_constants();
  const GoalTolerance& tol = planner.config().tol;
  const int H = planner.config().H;
  const ChassisPolytope chassis = ChassisPolytope::rectangle(p);

  const Pose2 anchor{snap.ev_state.x, snap.ev_state.y, snap.ev_state.phi};
  const Vec2 goal_pos = to_ev_frame(anchor, {snap.goal.x, snap.goal.y});
  const GoalSetpoint goal{goal_pos.x, goal_pos.y, snap.goal.phi - anchor.phi,
                          snap.goal.v};

  const double goal_cos = std::cos(goal.phi);
  const double goal_sin = std::sin(goal.phi);
  auto at_goal = [&](const VehicleState& z) {
    const double gdx = goal.x - z.x;
    const double gdy = goal.y - z.y;
    return std::abs(goal_cos * gdx + goal_sin * gdy) <= tol.eps_xi &&
           std::abs(-goal_sin * gdx + goal_cos * gdy) <= tol.eps_eta &&
           std::abs(wrap_angle(goal.phi - z.phi)) <= tol.eps_phi &&
           std::abs(goal.v - z.v) <= tol.eps_v;
  };

  VehicleState z{0.0, 0.0, 0.0, snap.ev_state.v};
  double act_delta = snap.actuator.delta;
  double prev_a0 = snap.prev_action.a0;

  RolloutResult r;
  r.trajectory.push_back(z);
  r.first_action =
      planner.policy().forward(theta, build_features(z, goal, prev_a0, nc));

  for (int h = 0;; ++h) {
    if (snap.obstacle_field.n_points > 0 &&
        collision({z.x, z.y, z.phi}, snap.obstacle_field.at(h), chassis)) {
      r.collided = true;
      break;
    }
    if (at_goal(z)) {
      r.reached = true;
      r.t_goal = h;
      break;
    }
    if (h == H) break;

    const ControlAction a =
        h == 0 ? r.first_action
               : planner.policy().forward(theta, build_features(z, goal, prev_a0, nc));
    const Controls u = map_controls(a, {act_delta}, p);
    const VehicleState next = step(z, u.delta, u.u_v, p);
    const double dx = next.x - z.x;
    const double dy = next.y - z.y;
    r.path_length += std::sqrt(dx * dx + dy * dy);
    z = next;
    act_delta = u.delta;
    prev_a0 = a.a0;
    r.trajectory.push_back(z);
  }

  r.terminal_cost = std::abs(goal.x - z.x) / nc.d_xi +
                    std::abs(goal.y - z.y) / nc.d_eta +
                    std::abs(wrap_angle(goal.phi - z.phi)) / nc.d_phi +
                    std::abs(goal.v - z.v) / nc.d_v;
  return r;
}

namespace {

PlanningSnapshot random_snapshot(std::mt19937_64& rng, int H, int n_params) {
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> vel(-8.0, 12.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> n_pts(0, 10);

  PlanningSnapshot snap;
  snap.ev_state = {pos(rng), pos(rng), 2.0 * ang(rng), vel(rng)};
  snap.actuator.delta = 0.6 * unit(rng);
  snap.prev_action = {0.9 * unit(rng), 0.9 * unit(rng)};
  snap.goal = {snap.ev_state.x + pos(rng), snap.ev_state.y + pos(rng), ang(rng),
               vel(rng)};

  std::vector<ObstaclePoint> pts;
  const int count = n_pts(rng);
  for (int i = 0; i < count; ++i) {
    pts.push_back({snap.ev_state.x + pos(rng), snap.ev_state.y + pos(rng),
                   ang(rng), std::abs(vel(rng))});
  }
  snap.obstacle_field = extrapolate(
      pts, H, 0.1, {snap.ev_state.x, snap.ev_state.y, snap.ev_state.phi});

  if (unit(rng) > 0.0) {
    snap.warm_theta.resize(n_params);
    for (double& w : snap.warm_theta) w = unit(rng);
  }
  return snap;
}

bool rollout_equal(const RolloutResult& a, const RolloutResult& b) {
  if (a.reached != b.reached || a.collided != b.collided ||
      a.t_goal != b.t_goal || a.path_length != b.path_length ||
      a.terminal_cost != b.terminal_cost ||
      a.first_action.a0 != b.first_action.a0 ||
      a.first_action.a1 != b.first_action.a1 ||
      a.trajectory.size() != b.trajectory.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    if (a.trajectory[i].x != b.trajectory[i].x ||
        a.trajectory[i].y != b.trajectory[i].y ||
        a.trajectory[i].phi != b.trajectory[i].phi ||
        a.trajectory[i].v != b.trajectory[i].v) {
      return false;
    }
  }
  return true;
}

CheckResult check_frame_roundtrip() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose2 anchor{u(rng), u(rng), u(rng)};
    const Vec2 pt{u(rng), u(rng)};
    const Vec2 back = from_ev_frame(anchor, to_ev_frame(anchor, pt));
    worst = std::max({worst, std::abs(back.x - pt.x), std::abs(back.y - pt.y)});
  }
  std::ostringstream detail;
  detail << "max round-trip error " << worst;
  return {"frame_roundtrip", worst < 1e-9, detail.str()};
}

CheckResult check_collision_oracle() {
  const VehicleParams params;
  const ChassisPolytope chassis = ChassisPolytope::rectangle(params);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-4.0 * std::numbers::pi,
                                             4.0 * std::numbers::pi);
  std::uniform_real_distribution<double> local(-4.0, 4.0);
  int tested = 0;
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const Pose2 pose{pos(rng), pos(rng), ang(rng)};
    const Vec2 pt{pose.x + local(rng), pose.y + local(rng)};
    const auto expected = chassis_oracle(pose, pt, params);
    if (!expected.has_value()) continue;
    ++tested;
    const Vec2 arr[1] = {pt};
    if (collision(pose, arr, chassis) != *expected) ++mismatches;
  }
  std::ostringstream detail;
  detail << mismatches << " mismatches over " << tested << " decided pairs";
  return {"collision_oracle", mismatches == 0 && tested > 9000, detail.str()};
}

CheckResult check_rng_streams() {
  PlannerConfig cfg;
  cfg.n_candidates = 8;
  cfg.n_restarts = 1;
  const Planner planner({}, MlpArchitecture{{5, 2, 2}}, cfg);
  const int np = planner.param_count();
  std::vector<double> center(np, 0.25);
  std::vector<double> a(np), b(np);
  bool ok = true;
  for (int c = 0; c < 8 && ok; ++c) {
    planner.sample_candidate(a, center, 7, 3, 0, c);
    planner.sample_candidate(b, center, 7, 3, 0, c);
    ok = ok && a == b;
    if (c == 0) ok = ok && a == center;
  }
  double sigma_min = 1e300;
  double sigma_max = 0.0;
  for (int c = 1; c < 1000; ++c) {
    const double s = planner.perturbation_sigma(0, 0, 0, c);
    sigma_min = std::min(sigma_min, s);
    sigma_max = std::max(sigma_max, s);
  }
  ok = ok && sigma_min >= 1e-2 && sigma_max <= 10.0;
  std::ostringstream detail;
  detail << "sigma range [" << sigma_min << ", " << sigma_max << "]";
  return {"rng_streams", ok, detail.str()};
}

CheckResult check_rollout_resimulation() {
  PlannerConfig cfg;
  cfg.H = 60;
  cfg.n_restarts = 3;
  cfg.n_candidates = 48;
  cfg.threads = 2;
  cfg.master_seed = 5;
  const Planner planner({}, MlpArchitecture{{5, 2, 2}}, cfg);
  std::mt19937_64 rng(13);
  int failures = 0;
  for (int i = 0; i < 20; ++i) {
    const PlanningSnapshot snap = random_snapshot(rng, cfg.H, planner.param_count());
    const PlannerOutput out = planner.plan_step(snap, i);
    const RolloutResult resim = resimulate_rollout(out.best_theta, snap, planner);
    if (!rollout_equal(out.predicted, resim)) ++failures;
  }
  std::ostringstream detail;
  detail << failures << " mismatches over 20 snapshots";
  return {"rollout_resimulation", failures == 0, detail.str()};
}

CheckResult check_thread_determinism() {
  std::mt19937_64 rng(14);
  PlannerConfig cfg;
  cfg.H = 50;
  cfg.n_candidates = 64;
  cfg.n_restarts = 2;
  cfg.master_seed = 3;

  bool ok = true;
  for (int i = 0; i < 5 && ok; ++i) {
    PlanningSnapshot snap = random_snapshot(rng, cfg.H, 18);
    std::vector<RolloutResult> predictions;
    std::vector<std::vector<double>> thetas;
    for (int threads : {1, 2, 8}) {
      PlannerConfig c = cfg;
      c.threads = threads;
      const Planner planner({}, MlpArchitecture{{5, 2, 2}}, c);
      const PlannerOutput out = planner.plan_step(snap, i);
      predictions.push_back(out.predicted);
      thetas.push_back(out.best_theta);
    }
    ok = ok && rollout_equal(predictions[0], predictions[1]) &&
         rollout_equal(predictions[0], predictions[2]) &&
         thetas[0] == thetas[1] && thetas[0] == thetas[2];
  }
  return {"thread_determinism", ok, "1/2/8 worker plans compared bitwise"};
}

CheckResult check_euler_convergence() {
  const auto integrate = [](double T_s) {
    VehicleParams p;
    p.T_s = T_s;
    VehicleState z{0.0, 0.0, 0.0, 5.0};
    const int steps = static_cast<int>(std::round(1.0 / T_s));
    for (int k = 0; k < steps; ++k) {
      const double t = k * T_s;
      const double delta = 0.5 * p.delta_max * std::sin(1.3 * t);
      const double u_v = 1.5 * std::cos(0.7 * t);
      z = step(z, delta, u_v, p);
    }
    return z;
  };
  const VehicleState ref = integrate(1e-4);
  const auto err = [&](double T_s) {
    const VehicleState z = integrate(T_s);
    return std::sqrt((z.x - ref.x) * (z.x - ref.x) +
                     (z.y - ref.y) * (z.y - ref.y) +
                     (z.phi - ref.phi) * (z.phi - ref.phi) +
                     (z.v - ref.v) * (z.v - ref.v));
  };
  const double e1 = err(0.1);
  const double e2 = err(0.01);
  const double e3 = err(0.001);
  const double r1 = e1 / e2;
  const double r2 = e2 / e3;
  std::ostringstream detail;
  detail << "error ratios " << r1 << ", " << r2;
  const bool ok = r1 >= 8.0 && r1 <= 12.0 && r2 >= 8.0 && r2 <= 12.0;
  return {"euler_convergence", ok, detail.str()};
}

CheckResult check_budget() {
  PlannerConfig cfg;
  cfg.H = 30;
  cfg.n_candidates = 32;
  cfg.n_restarts = 3;
  cfg.n_iter_max = 2;
  const Planner planner({}, MlpArchitecture{{5, 2, 2}}, cfg);
  std::mt19937_64 rng(15);
  const PlanningSnapshot snap = random_snapshot(rng, cfg.H, planner.param_count());
  const PlannerOutput out = planner.plan_step(snap, 0);
  const std::int64_t want =
      static_cast<std::int64_t>(cfg.n_restarts) * cfg.n_iter_max * cfg.n_candidates;
  std::ostringstream detail;
  detail << out.evaluated << " rollouts, expected " << want;
  return {"rollout_budget", out.evaluated == want, detail.str()};
}

}  // namespace

std::vector<CheckResult> run_selfchecks() {
  return {
      check_frame_roundtrip(),  check_collision_oracle(),
      check_rng_streams(),      check_rollout_resimulation(),
      check_thread_determinism(), check_euler_convergence(),
      check_budget(),
  };
}

}  // namespace paraplan
