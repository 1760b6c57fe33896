#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "paraplan/dynamics.hpp"
#include "paraplan/geometry.hpp"
#include "paraplan/policy.hpp"

namespace paraplan {

struct GoalTolerance {
  double eps_xi = 1.0;                             // [m]
  double eps_eta = 0.25;                           // [m]
  double eps_phi = 10.0 * std::numbers::pi / 180.0;  // [rad]
  double eps_v = 5.0 / 3.6;                        // [m/s]
};

struct PlannerConfig {
  int H = 200;             // prediction steps per rollout
  int n_restarts = 15;     // outer sampling restarts
  int n_iter_max = 1;      // hill-climb iterations per restart
  int n_candidates = 20480;  // parameter vectors per iteration
  int n_obst_pts = 20;     // sensing cap, consumed by the mission layer
  GoalTolerance tol;
  double sigma_log_low = -2.0;  // perturbation scale drawn from 10^U(low, high)
  double sigma_log_high = 1.0;
  std::uint64_t master_seed = 0;
  bool early_exit = false;  // stop sampling once a reaching rollout exists
  int threads = 1;

  void validate() const;
};

// Everything a planning tick may read: the data that changes between ticks.
// Model constants and hyperparameters live in the Planner itself.
struct PlanningSnapshot {
  VehicleState ev_state;  // world frame
  ActuatorState actuator;
  ControlAction prev_action;
  GoalSetpoint goal;                 // world frame, inside the range field
  ExtrapolatedField obstacle_field;  // anchored at the EV pose
  std::vector<double> warm_theta;    // empty = start from the zero vector
};

struct RolloutResult {
  bool reached = false;
  int t_goal = -1;  // step index of goal entry, -1 when not reached
  bool collided = false;
  double path_length = 0.0;    // sum of sqrt(dx^2 + dy^2) over simulated steps
  double terminal_cost = 0.0;  // four normalized absolute errors, last state
  ControlAction first_action;
  std::vector<VehicleState> trajectory;  // anchor frame, <= H+1 states
};

// Lexicographic rollout ranking, higher class first:
//   collision-free beats collided, reaching beats not reaching;
//   reached rollouts tie-break on (-t_goal, -path_length),
//   everything else on -terminal_cost.
struct ScoreKey {
  int cls = 0;  // 2 reached, 1 collision-free, 0 collided
  double k1 = 0.0;
  double k2 = 0.0;
};

ScoreKey score(const RolloutResult& r);
bool better(const ScoreKey& a, const ScoreKey& b);

struct PlannerOutput {
  std::vector<double> best_theta;
  ControlAction action;
  RolloutResult predicted;
  bool success = false;  // a reaching, collision-free rollout was found
  std::int64_t evaluated = 0;
};

namespace detail {
class ThreadPool;
}

// Online sampler in the parameter space of the controller network: rolls out
// n perturbed parameter vectors per iteration, restarts re-centered on the
// incumbent best, and returns the globally best candidate. Deterministic for
// a fixed master seed regardless of thread count.
class Planner {
 public:
  Planner(const VehicleParams& params, const MlpArchitecture& arch,
          const PlannerConfig& cfg, const NormConstants& norm = {});
  ~Planner();

  Planner(const Planner&) = delete;
  Planner& operator=(const Planner&) = delete;

  PlannerOutput plan_step(const PlanningSnapshot& snap, std::uint64_t t) const;

  // Forward simulation of one parameter vector over the horizon, in the
  // anchor frame of the snapshot. Terminates at the first collision or the
  // first goal entry.
  RolloutResult rollout(std::span<const double> theta,
                        const PlanningSnapshot& snap) const;

  // Candidate `candidate` of the given iteration around `center`. Index 0 is
  // the unperturbed center; every other index perturbs each coordinate with
  // sigma * N(0,1), sigma drawn log-uniformly per candidate.
  void sample_candidate(std::span<double> out, std::span<const double> center,
                        std::uint64_t t, int restart, int iter,
                        int candidate) const;

  // The perturbation scale the candidate's stream draws first.
  double perturbation_sigma(std::uint64_t t, int restart, int iter,
                            int candidate) const;

  const PlannerConfig& config() const { return cfg_; }
  const VehicleParams& vehicle_params() const { return params_; }
  const NormConstants& norm_constants() const { return norm_; }
  const MlpPolicy& policy() const { return policy_; }
  int param_count() const { return policy_.param_count(); }

 private:
  struct RolloutStats {
    bool reached = false;
    int t_goal = -1;
    bool collided = false;
    double path_length = 0.0;
    double terminal_cost = 0.0;
    ControlAction first_action;
  };

  template <bool kKeepTrajectory>
  RolloutStats simulate(std::span<const double> theta,
                        const PlanningSnapshot& snap,
                        std::vector<VehicleState>* trajectory) const;

  VehicleParams params_;
  PlannerConfig cfg_;
  NormConstants norm_;
  MlpPolicy policy_;
  ChassisPolytope chassis_;
  std::unique_ptr<detail::ThreadPool> pool_;
};

}  // namespace paraplan
