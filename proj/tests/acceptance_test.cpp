// Acceptance suite: one test per release criterion, each printing a summary
// line. The scenario sweeps run at the reduced desk budget (2048 candidates
// per iteration, 15 restarts) and take minutes of CPU time each.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "paraplan/scenario.hpp"
#include "paraplan/selfcheck.hpp"

namespace paraplan {
namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

int worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::path("acceptance_out") / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SweepReport desk_sweep(const std::string& name, const fs::path& dir,
                       int samples) {
  ScenarioSpec spec = builtin_scenario(name);
  spec.planner.n_candidates = samples;  // N_restarts and the rest stay at defaults
  return run_sweep(spec, dir, worker_threads());
}

void announce(int criterion, bool pass, const std::string& detail) {
  std::printf("[ACCEPTANCE] criterion %d: %s  (%s)\n", criterion,
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

// Ground-truth collision count along an executed trajectory: for every tick
// the planner reported success, the state it produced one step later must not
// contain any obstacle point of the true world.
int ground_truth_violations(const std::vector<CsvRow>& rows,
                            const std::vector<ObstaclePoint>& static_pts,
                            const std::vector<ObstaclePoint>& dynamic_pts,
                            const VehicleParams& params) {
  const ChassisPolytope chassis = ChassisPolytope::rectangle(params);
  int violations = 0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (!rows[i].planner_success) continue;
    const CsvRow& next = rows[i + 1];
    std::vector<Vec2> pts;
    pts.reserve(static_pts.size() + dynamic_pts.size());
    for (const ObstaclePoint& p : static_pts) pts.push_back({p.x, p.y});
    for (const ObstaclePoint& p : dynamic_pts) {
      const double travelled = next.t_s * p.speed;
      pts.push_back({p.x + travelled * std::cos(p.heading),
                     p.y + travelled * std::sin(p.heading)});
    }
    if (collision({next.x, next.y, next.phi}, pts, chassis)) ++violations;
  }
  return violations;
}

TEST(Acceptance, Criterion01_ParamCounts) {
  const bool pass = param_count({{5, 2, 2}}) == 18 &&
                    param_count({{5, 10, 2}}) == 82 &&
                    param_count({{5, 10, 10, 2}}) == 192;
  announce(1, pass, "[5,2,2]=18, [5,10,2]=82, [5,10,10,2]=192");
  EXPECT_EQ(param_count({{5, 2, 2}}), 18);
  EXPECT_EQ(param_count({{5, 10, 2}}), 82);
  EXPECT_EQ(param_count({{5, 10, 10, 2}}), 192);
}

TEST(Acceptance, Criterion02_IdleControl) {
  const VehicleParams p;
  const double idle = idle_longitudinal(p);
  const Controls u = map_controls({0.0, idle}, {0.0}, p);
  const bool pass = std::abs(u.u_v) < 1e-12 && std::abs(idle - 0.321429) < 1e-6;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "idle=%.9f, |u_v|=%.3g", idle,
                std::abs(u.u_v));
  announce(2, pass, detail);
  EXPECT_LT(std::abs(u.u_v), 1e-12);
  EXPECT_NEAR(idle, 0.321429, 1e-6);
}

TEST(Acceptance, Criterion03_CollisionOracle) {
  const VehicleParams params;
  const ChassisPolytope chassis = ChassisPolytope::rectangle(params);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-4.0 * kPi, 4.0 * kPi);
  std::uniform_real_distribution<double> local(-4.5, 4.5);
  int decided = 0;
  int mismatches = 0;
  while (decided < 10000) {
    const Pose2 pose{pos(rng), pos(rng), ang(rng)};
    const Vec2 pt{pose.x + local(rng), pose.y + local(rng)};
    const auto expected = chassis_oracle(pose, pt, params);
    if (!expected.has_value()) continue;
    ++decided;
    const Vec2 arr[1] = {pt};
    if (collision(pose, arr, chassis) != *expected) ++mismatches;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "%d/%d pairs agree", decided - mismatches,
                decided);
  announce(3, mismatches == 0, detail);
  EXPECT_EQ(mismatches, 0);
}

TEST(Acceptance, Criterion04_ThreadCountDeterminism) {
  ScenarioSpec spec = builtin_scenario("exp1");
  spec.planner.n_candidates = 512;
  spec.seeds = {0};
  const fs::path dir1 = fresh_dir("determinism_t1");
  const fs::path dir8 = fresh_dir("determinism_t8");
  run_sweep(spec, dir1, 1);
  run_sweep(spec, dir8, 8);

  // plan_time_s is wall clock, the one intentionally non-deterministic
  // column; everything before it must match byte for byte.
  const auto masked = [](const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::string text;
    std::string line;
    while (std::getline(in, line)) {
      text += line.substr(0, line.rfind(','));
      text += '\n';
    }
    return text;
  };
  const std::string a = masked(dir1 / seed_csv_name("exp1", 0));
  const std::string b = masked(dir8 / seed_csv_name("exp1", 0));
  const bool pass = !a.empty() && a == b;
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "masked CSV bytes equal across 1 and 8 threads: %s",
                pass ? "yes" : "no");
  announce(4, pass, detail);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
}

TEST(Acceptance, Criterion05_Experiment2DeskScale) {
  const fs::path dir = fresh_dir("exp2");
  const SweepReport report = desk_sweep("exp2", dir, 2048);
  int completed = 0;
  double worst_y = 0.0;
  for (const SeedResult& r : report.per_seed) {
    if (!r.stats.completed) continue;
    ++completed;
    worst_y = std::max(worst_y, r.stats.y_abs_max);
  }
  const bool pass = completed >= 9 && worst_y <= 1.0;
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "completed %d/10 (need >= 9), worst |y|max %.3f m (cap 1.0)",
                completed, worst_y);
  announce(5, pass, detail);
  EXPECT_GE(completed, 9);
  EXPECT_LE(worst_y, 1.0);
}

TEST(Acceptance, Criterion06_Experiment1DeskScale) {
  const fs::path dir = fresh_dir("exp1");
  const SweepReport report = desk_sweep("exp1", dir, 2048);
  int completed = 0;
  double p_min = 1e300;
  double p_max = 0.0;
  bool paths_ok = true;
  for (const SeedResult& r : report.per_seed) {
    if (!r.stats.completed) continue;
    ++completed;
    p_min = std::min(p_min, r.stats.path_length);
    p_max = std::max(p_max, r.stats.path_length);
    paths_ok = paths_ok && r.stats.path_length >= 15.0 &&
               r.stats.path_length <= 45.0;
  }
  const bool pass = completed >= 8 && paths_ok;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "completed %d/10 (need >= 8), P range [%.1f, %.1f] m "
                "(window [15, 45])",
                completed, completed ? p_min : 0.0, p_max);
  announce(6, pass, detail);
  EXPECT_GE(completed, 8);
  EXPECT_TRUE(paths_ok);
}

TEST(Acceptance, Criterion07_Experiment3BothVariants) {
  const ScenarioSpec truth = builtin_scenario("exp3_explicit");
  const VehicleParams params;
  bool all_pass = true;
  for (const std::string name : {"exp3_explicit", "exp3_auxiliary"}) {
    const fs::path dir = fresh_dir(name);
    const SweepReport report = desk_sweep(name, dir, 2048);
    int completed = 0;
    int violations = 0;
    for (const SeedResult& r : report.per_seed) {
      if (r.stats.completed) ++completed;
      const auto rows = read_trajectory_csv(dir / seed_csv_name(name, r.seed));
      violations += ground_truth_violations(
          rows, truth.mission.static_points, truth.mission.dynamic_points,
          params);
    }
    const bool pass = violations == 0 && completed >= 8;
    all_pass = all_pass && pass;
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "%s: completed %d/10 (need >= 8), %d ground-truth "
                  "violations (need 0)",
                  name.c_str(), completed, violations);
    announce(7, pass, detail);
    EXPECT_EQ(violations, 0) << name;
    EXPECT_GE(completed, 8) << name;
  }
  EXPECT_TRUE(all_pass);
}

TEST(Acceptance, Criterion08_Experiment5DeskScale) {
  const fs::path dir = fresh_dir("exp5_3wp");
  const SweepReport report = desk_sweep("exp5_3wp", dir, 2048);
  const ScenarioSpec spec = builtin_scenario("exp5_3wp");
  const VehicleParams params;
  const ChassisPolytope chassis = ChassisPolytope::rectangle(params);
  std::vector<Vec2> lot;
  for (const ObstaclePoint& p : spec.mission.static_points) {
    lot.push_back({p.x, p.y});
  }

  int completed_clean = 0;
  bool paths_ok = true;
  double p_min = 1e300;
  double p_max = 0.0;
  for (const SeedResult& r : report.per_seed) {
    if (!r.stats.completed) continue;
    const auto rows =
        read_trajectory_csv(dir / seed_csv_name("exp5_3wp", r.seed));
    int hits = 0;
    for (const CsvRow& row : rows) {
      if (collision({row.x, row.y, row.phi}, lot, chassis)) ++hits;
    }
    if (hits == 0) ++completed_clean;
    p_min = std::min(p_min, r.stats.path_length);
    p_max = std::max(p_max, r.stats.path_length);
    paths_ok = paths_ok && r.stats.path_length >= 10.0 &&
               r.stats.path_length <= 25.0;
  }
  const bool pass = completed_clean >= 7 && paths_ok;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "collision-free completions %d/10 (need >= 7), P range "
                "[%.1f, %.1f] m (window [10, 25])",
                completed_clean, completed_clean ? p_min : 0.0, p_max);
  announce(8, pass, detail);
  EXPECT_GE(completed_clean, 7);
  EXPECT_TRUE(paths_ok);
}

TEST(Acceptance, Criterion09_RolloutResimulationOracle) {
  PlannerConfig cfg;
  cfg.H = 60;
  cfg.n_candidates = 64;
  cfg.n_restarts = 3;
  cfg.threads = worker_threads() > 1 ? worker_threads() : 2;
  cfg.master_seed = 77;
  const Planner planner({}, MlpArchitecture{{5, 2, 2}}, cfg);

  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_real_distribution<double> ang(-2.0 * kPi, 2.0 * kPi);
  std::uniform_real_distribution<double> vel(-8.0, 12.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> n_pts(0, 12);

  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    PlanningSnapshot snap;
    snap.ev_state = {pos(rng), pos(rng), ang(rng), vel(rng)};
    snap.actuator.delta = 0.6 * unit(rng);
    snap.prev_action = {0.9 * unit(rng), 0.9 * unit(rng)};
    snap.goal = {snap.ev_state.x + pos(rng), snap.ev_state.y + pos(rng),
                 ang(rng), vel(rng)};
    std::vector<ObstaclePoint> pts;
    const int count = n_pts(rng);
    for (int j = 0; j < count; ++j) {
      pts.push_back({snap.ev_state.x + pos(rng), snap.ev_state.y + pos(rng),
                     ang(rng), std::abs(vel(rng))});
    }
    snap.obstacle_field = extrapolate(
        pts, cfg.H, 0.1, {snap.ev_state.x, snap.ev_state.y, snap.ev_state.phi});
    if (unit(rng) > 0.0) {
      snap.warm_theta.resize(planner.param_count());
      for (double& w : snap.warm_theta) w = unit(rng);
    }

    const PlannerOutput out = planner.plan_step(snap, i);
    const RolloutResult resim = resimulate_rollout(out.best_theta, snap, planner);
    bool equal = out.predicted.reached == resim.reached &&
                 out.predicted.collided == resim.collided &&
                 out.predicted.t_goal == resim.t_goal &&
                 out.predicted.path_length == resim.path_length &&
                 out.predicted.terminal_cost == resim.terminal_cost &&
                 out.predicted.first_action.a0 == resim.first_action.a0 &&
                 out.predicted.first_action.a1 == resim.first_action.a1 &&
                 out.predicted.trajectory.size() == resim.trajectory.size();
    if (equal) {
      for (std::size_t k = 0; k < resim.trajectory.size(); ++k) {
        equal = equal && out.predicted.trajectory[k].x == resim.trajectory[k].x &&
                out.predicted.trajectory[k].y == resim.trajectory[k].y &&
                out.predicted.trajectory[k].phi == resim.trajectory[k].phi &&
                out.predicted.trajectory[k].v == resim.trajectory[k].v;
      }
    }
    if (!equal) ++mismatches;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "%d/100 snapshots bit-identical to the re-simulation",
                100 - mismatches);
  announce(9, mismatches == 0, detail);
  EXPECT_EQ(mismatches, 0);
}

// Normalization sanity across a realistic run: the four tracking-error
// features stay roughly inside the unit box on the lane scenario.
TEST(Invariants, FeatureRangeOnLaneScenario) {
  const ScenarioSpec spec = builtin_scenario("exp2");
  PlannerConfig cfg = spec.planner;
  cfg.n_candidates = 512;
  const SimulationLog log =
      run_mission(spec.mission, cfg, spec.arch, 0, {}, spec.norm);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LE(log.max_abs_feature[i], 2.0) << "feature " << i;
  }
  std::printf("[invariant] exp2 max |feature| = %.3f %.3f %.3f %.3f\n",
              log.max_abs_feature[0], log.max_abs_feature[1],
              log.max_abs_feature[2], log.max_abs_feature[3]);
}

TEST(Acceptance, Criterion10_EulerConvergence) {
  const auto integrate = [](double T_s) {
    VehicleParams p;
    p.T_s = T_s;
    VehicleState z{0.0, 0.0, 0.0, 5.0};
    const int steps = static_cast<int>(std::round(1.0 / T_s));
    for (int k = 0; k < steps; ++k) {
      const double t = k * T_s;
      z = step(z, 0.5 * p.delta_max * std::sin(1.3 * t),
               1.5 * std::cos(0.7 * t), p);
    }
    return z;
  };
  const VehicleState ref = integrate(1e-4);
  const auto err = [&](double T_s) {
    const VehicleState z = integrate(T_s);
    return std::sqrt(
        (z.x - ref.x) * (z.x - ref.x) + (z.y - ref.y) * (z.y - ref.y) +
        (z.phi - ref.phi) * (z.phi - ref.phi) + (z.v - ref.v) * (z.v - ref.v));
  };
  const double r1 = err(0.1) / err(0.01);
  const double r2 = err(0.01) / err(0.001);
  const bool pass = r1 >= 8.0 && r1 <= 12.0 && r2 >= 8.0 && r2 <= 12.0;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "error ratios %.2f and %.2f (window [8, 12])",
                r1, r2);
  announce(10, pass, detail);
  EXPECT_GE(r1, 8.0);
  EXPECT_LE(r1, 12.0);
  EXPECT_GE(r2, 8.0);
  EXPECT_LE(r2, 12.0);
}

}  // namespace
}  // namespace paraplan
