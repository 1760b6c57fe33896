#include "paraplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paraplan/rng.hpp"
#include "thread_pool.hpp"

namespace paraplan {

void PlannerConfig::validate() const {
  if (H < 1) throw std::invalid_argument("H must be >= 1");
  if (n_candidates < 1) throw std::invalid_argument("n must be >= 1");
  if (n_restarts < 1) throw std::invalid_argument("N_restarts must be >= 1");
  if (n_iter_max < 1) throw std::invalid_argument("N_iter_max must be >= 1");
  if (n_obst_pts < 0) throw std::invalid_argument("N_obstPts must be >= 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(sigma_log_low <= sigma_log_high)) {
    throw std::invalid_argument("sigma range must be ordered");
  }
  if (!(tol.eps_xi > 0 && tol.eps_eta > 0 && tol.eps_phi > 0 && tol.eps_v > 0)) {
    throw std::invalid_argument("goal tolerances must be positive");
  }
}

ScoreKey score(const RolloutResult& r) {
  ScoreKey key;
  key.cls = r.collided ? 0 : (r.reached ? 2 : 1);
  if (key.cls == 2) {
    key.k1 = -static_cast<double>(r.t_goal);
    key.k2 = -r.path_length;
  } else {
    key.k1 = -r.terminal_cost;
    key.k2 = 0.0;
  }
  return key;
}

bool better(const ScoreKey& a, const ScoreKey& b) {
  if (a.cls != b.cls) return a.cls > b.cls;
  if (a.k1 != b.k1) return a.k1 > b.k1;
  return a.k2 > b.k2;
}

Planner::Planner(const VehicleParams& params, const MlpArchitecture& arch,
                 const PlannerConfig& cfg, const NormConstants& norm)
    : params_(params),
      cfg_(cfg),
      norm_(norm),
      policy_(arch),
      chassis_(ChassisPolytope::rectangle(params)) {
  params_.validate();
  cfg_.validate();
  if (cfg_.threads > 1) {
    pool_ = std::make_unique<detail::ThreadPool>(cfg_.threads);
  }
}

Planner::~Planner() = default;

// Hot path. Features, network, control map and Euler step are written out
// inline with the same expression order as the public functions; together
// with -ffp-contract=off this keeps the kernel bit-identical to a step-by-
// step re-simulation through the public API.
template <bool kKeepTrajectory>
Planner::RolloutStats Planner::simulate(
    std::span<const double> theta, const PlanningSnapshot& snap,
    std::vector<VehicleState>* trajectory) const {
  const Pose2 anchor{snap.ev_state.x, snap.ev_state.y, snap.ev_state.phi};
  const Vec2 goal_pos = to_ev_frame(anchor, {snap.goal.x, snap.goal.y});
  const GoalSetpoint goal{goal_pos.x, goal_pos.y, snap.goal.phi - anchor.phi,
                          snap.goal.v};
  const bool check_obstacles = snap.obstacle_field.n_points > 0;

  const GoalTolerance& tol = cfg_.tol;
  // Goal entry is tested in the goal's own frame: the tolerance box sits
  // fixed relative to the goal pose instead of rotating with the EV heading,
  // so a plan that reaches keeps reaching under re-planning.
  const double goal_cos = std::cos(goal.phi);
  const double goal_sin = std::sin(goal.phi);
  const std::span<const int> sizes = policy_.architecture().layer_sizes;
  const int n_layers = static_cast<int>(sizes.size());
  const double* theta_data = theta.data();

  double buf_a[MlpPolicy::kMaxWidth];
  double buf_b[MlpPolicy::kMaxWidth];

  const auto net = [&](double s0, double s1, double s2, double s3,
                       double s4) -> ControlAction {
    buf_a[0] = s0;
    buf_a[1] = s1;
    buf_a[2] = s2;
    buf_a[3] = s3;
    buf_a[4] = s4;
    double* cur = buf_a;
    double* nxt = buf_b;
    std::size_t off = 0;
    for (int l = 0; l + 1 < n_layers; ++l) {
      const int n_in = sizes[l];
      const int n_out = sizes[l + 1];
      const double* weights = theta_data + off;
      const double* biases = weights + static_cast<std::size_t>(n_in) * n_out;
      for (int o = 0; o < n_out; ++o) {
        const double* row = weights + static_cast<std::size_t>(o) * n_in;
        double acc = biases[o];
        for (int i = 0; i < n_in; ++i) acc += row[i] * cur[i];
        nxt[o] = std::tanh(acc);
      }
      off += static_cast<std::size_t>(n_in + 1) * n_out;
      std::swap(cur, nxt);
    }
    return {cur[0], cur[1]};
  };

  const auto features_to_action = [&](const VehicleState& z,
                                      double prev_a0) -> ControlAction {
    return net((goal.x - z.x) / norm_.d_xi, (goal.y - z.y) / norm_.d_eta,
               wrap_angle(goal.phi - z.phi) / norm_.d_phi,
               (goal.v - z.v) / norm_.d_v, prev_a0);
  };

  VehicleState z{0.0, 0.0, 0.0, snap.ev_state.v};
  double act_delta = snap.actuator.delta;
  double prev_a0 = snap.prev_action.a0;

  RolloutStats r;
  if constexpr (kKeepTrajectory) trajectory->push_back(z);

  // The first action exists even for rollouts that terminate at h = 0; the
  // applied control is always the network output at the current state.
  r.first_action = features_to_action(z, prev_a0);

  const double rate_window = params_.delta_rate_max * params_.T_s;
  const double wheelbase = params_.l_f + params_.l_r;

  for (int h = 0;; ++h) {
    if (check_obstacles &&
        collision({z.x, z.y, z.phi}, snap.obstacle_field.at(h), chassis_)) {
      r.collided = true;
      break;
    }
    const double gdx = goal.x - z.x;
    const double gdy = goal.y - z.y;
    if (std::abs(goal_cos * gdx + goal_sin * gdy) <= tol.eps_xi &&
        std::abs(-goal_sin * gdx + goal_cos * gdy) <= tol.eps_eta &&
        std::abs(wrap_angle(goal.phi - z.phi)) <= tol.eps_phi &&
        std::abs(goal.v - z.v) <= tol.eps_v) {
      r.reached = true;
      r.t_goal = h;
      break;
    }
    if (h == cfg_.H) break;

    const ControlAction a = h == 0 ? r.first_action : features_to_action(z, prev_a0);

    // map_controls, inlined
    const double a0 = std::clamp(a.a0, -1.0, 1.0);
    const double a1 = std::clamp(a.a1, -1.0, 1.0);
    double delta = std::clamp(params_.delta_max * a0, act_delta - rate_window,
                              act_delta + rate_window);
    delta = std::clamp(delta, -params_.delta_max, params_.delta_max);
    const double w = 0.5 * (a1 + 1.0);
    const double u_v = (1.0 - w) * params_.u_v_min + w * params_.u_v_max;

    // Euler step, inlined
    const double tan_delta = std::tan(delta);
    const double tb = params_.l_r * tan_delta / wheelbase;
    const double c = std::cos(z.phi);
    const double s = std::sin(z.phi);
    VehicleState next;
    next.x = z.x + params_.T_s * z.v * (c - tb * s);
    next.y = z.y + params_.T_s * z.v * (s + tb * c);
    next.phi = z.phi + params_.T_s * z.v * tan_delta / wheelbase;
    next.v = z.v + params_.T_s * u_v;

    const double dx = next.x - z.x;
    const double dy = next.y - z.y;
    r.path_length += std::sqrt(dx * dx + dy * dy);
    z = next;
    act_delta = delta;
    prev_a0 = a.a0;
    if constexpr (kKeepTrajectory) trajectory->push_back(z);
  }

  r.terminal_cost = std::abs(goal.x - z.x) / norm_.d_xi +
                    std::abs(goal.y - z.y) / norm_.d_eta +
                    std::abs(wrap_angle(goal.phi - z.phi)) / norm_.d_phi +
                    std::abs(goal.v - z.v) / norm_.d_v;
  return r;
}

RolloutResult Planner::rollout(std::span<const double> theta,
                               const PlanningSnapshot& snap) const {
  RolloutResult out;
  out.trajectory.reserve(cfg_.H + 1);
  const RolloutStats r = simulate<true>(theta, snap, &out.trajectory);
  out.reached = r.reached;
  out.t_goal = r.t_goal;
  out.collided = r.collided;
  out.path_length = r.path_length;
  out.terminal_cost = r.terminal_cost;
  out.first_action = r.first_action;
  return out;
}

void Planner::sample_candidate(std::span<double> out,
                               std::span<const double> center, std::uint64_t t,
                               int restart, int iter, int candidate) const {
  if (out.size() != center.size()) {
    throw std::invalid_argument("candidate buffer size mismatch");
  }
  if (candidate == 0) {
    std::copy(center.begin(), center.end(), out.begin());
    return;
  }
  KeyedRng rng(cfg_.master_seed, t, static_cast<std::uint64_t>(restart),
               static_cast<std::uint64_t>(iter),
               static_cast<std::uint64_t>(candidate));
  const double sigma =
      std::pow(10.0, cfg_.sigma_log_low +
                         rng.next_unit() * (cfg_.sigma_log_high - cfg_.sigma_log_low));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = center[i] + sigma * rng.next_normal();
  }
}

double Planner::perturbation_sigma(std::uint64_t t, int restart, int iter,
                                   int candidate) const {
  KeyedRng rng(cfg_.master_seed, t, static_cast<std::uint64_t>(restart),
               static_cast<std::uint64_t>(iter),
               static_cast<std::uint64_t>(candidate));
  return std::pow(10.0, cfg_.sigma_log_low +
                            rng.next_unit() *
                                (cfg_.sigma_log_high - cfg_.sigma_log_low));
}

PlannerOutput Planner::plan_step(const PlanningSnapshot& snap,
                                 std::uint64_t t) const {
  const int np = policy_.param_count();
  if (!snap.warm_theta.empty() &&
      static_cast<int>(snap.warm_theta.size()) != np) {
    throw std::invalid_argument("warm start vector size mismatch");
  }

  std::vector<double> init_center(np, 0.0);
  if (!snap.warm_theta.empty()) init_center = snap.warm_theta;
  std::vector<double> center = init_center;

  struct Incumbent {
    ScoreKey key;
    std::vector<double> theta;
    bool valid = false;
  };
  Incumbent best;
  bool any_collision_free = false;
  std::int64_t evaluated = 0;

  const int n = cfg_.n_candidates;
  const int workers = pool_ ? pool_->workers() : 1;

  struct LocalBest {
    ScoreKey key;
    int candidate = -1;
    bool any_free = false;
  };
  std::vector<LocalBest> locals(workers);

  for (int restart = 0; restart < cfg_.n_restarts; ++restart) {
    for (int iter = 0; iter < cfg_.n_iter_max; ++iter) {
      // Every restart re-initializes at the warm start; hill-climb iterations
      // within a restart climb on the incumbent best.
      if (iter == 0) {
        center = init_center;
      } else if (best.valid) {
        center = best.theta;
      }

      auto evaluate_block = [&](int w) {
        const int begin = static_cast<int>(static_cast<std::int64_t>(n) * w / workers);
        const int end = static_cast<int>(static_cast<std::int64_t>(n) * (w + 1) / workers);
        std::vector<double> theta(np);
        LocalBest local;
        for (int c = begin; c < end; ++c) {
          sample_candidate(theta, center, t, restart, iter, c);
          const RolloutStats stats = simulate<false>(theta, snap, nullptr);
          RolloutResult light;
          light.reached = stats.reached;
          light.t_goal = stats.t_goal;
          light.collided = stats.collided;
          light.path_length = stats.path_length;
          light.terminal_cost = stats.terminal_cost;
          const ScoreKey key = score(light);
          local.any_free = local.any_free || !stats.collided;
          if (local.candidate < 0 || better(key, local.key)) {
            local.key = key;
            local.candidate = c;
          }
        }
        locals[w] = local;
      };

      if (pool_) {
        pool_->run(evaluate_block);
      } else {
        evaluate_block(0);
      }
      evaluated += n;

      // Deterministic merge: workers own disjoint, increasing index ranges,
      // so scanning them in order keeps the lowest-index tie winner.
      LocalBest merged;
      for (const LocalBest& local : locals) {
        if (local.candidate < 0) continue;
        merged.any_free = merged.any_free || local.any_free;
        if (merged.candidate < 0 || better(local.key, merged.key)) {
          merged.key = local.key;
          merged.candidate = local.candidate;
        }
      }
      any_collision_free = any_collision_free || merged.any_free;

      // Strict comparison: an equal score keeps the earlier incumbent.
      if (!best.valid || better(merged.key, best.key)) {
        std::vector<double> theta(np);
        sample_candidate(theta, center, t, restart, iter, merged.candidate);
        best.key = merged.key;
        best.theta = std::move(theta);
        best.valid = true;
      }

      if (cfg_.early_exit && best.valid && best.key.cls == 2) {
        goto sampling_done;
      }
    }
  }
sampling_done:

  PlannerOutput out;
  out.evaluated = evaluated;
  out.best_theta = best.theta;
  out.predicted = rollout(out.best_theta, snap);
  out.success = out.predicted.reached && !out.predicted.collided;
  if (any_collision_free) {
    out.action = out.predicted.first_action;
  } else {
    // Nothing collision-free among the samples: hold steering, full braking.
    out.action = {snap.actuator.delta / params_.delta_max, -1.0};
  }
  return out;
}

}  // namespace paraplan
