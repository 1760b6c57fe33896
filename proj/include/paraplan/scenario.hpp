#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "paraplan/mission.hpp"

namespace paraplan {

// Invalid user input: unknown scenario names, malformed files.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One self-contained experiment definition: mission data, sampler settings,
// network architecture and the seeds to sweep.
struct ScenarioSpec {
  std::string name;
  Mission mission;
  PlannerConfig planner;
  NormConstants norm;
  MlpArchitecture arch;
  std::vector<std::uint64_t> seeds;
};

std::vector<std::string> builtin_scenario_names();

// Throws UsageError (listing the valid names) for unknown names.
ScenarioSpec builtin_scenario(const std::string& name);

// Scenario files are JSON with // comments; comments mark values transcribed
// from plots rather than stated numerically. save/load round-trips losslessly.
ScenarioSpec load_scenario(const std::filesystem::path& file);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& file);
std::string serialize_scenario(const ScenarioSpec& spec);

struct SeedResult {
  std::uint64_t seed = 0;
  MissionStats stats;
};

struct Aggregate {
  double min = 0.0;
  double avg = 0.0;
  double max = 0.0;
};

struct SweepReport {
  std::string scenario;
  std::vector<SeedResult> per_seed;
  Aggregate path_length_m;  // over per-seed path lengths
  Aggregate v_kmh;          // min of minima / mean of means / max of maxima
  Aggregate tau_s;          // over per-seed mean planning times
  int success_count = 0;
};

// Runs the mission once per seed (seeds may execute in parallel), writes one
// trajectory CSV and one XY series file per seed plus an aggregate JSON
// report into out_dir. Throws std::runtime_error before any simulation when
// out_dir is not writable.
SweepReport run_sweep(const ScenarioSpec& spec,
                      const std::filesystem::path& out_dir, int threads);

// Output naming used by run_sweep.
std::string seed_csv_name(const std::string& scenario, std::uint64_t seed);
std::string seed_xy_name(const std::string& scenario, std::uint64_t seed);
std::string report_name(const std::string& scenario);
std::string scenario_file_name(const std::string& scenario);

// Fixed-column trajectory CSV:
// t_s,x_m,y_m,phi_rad,v_mps,a0,a1,delta_rad,waypoint_idx,planner_success,plan_time_s
void write_trajectory_csv(const std::filesystem::path& file,
                          const SimulationLog& log, double T_s);

struct CsvRow {
  double t_s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double v = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double delta = 0.0;
  int waypoint_idx = 0;
  bool planner_success = false;
  double plan_time = 0.0;
};

std::vector<CsvRow> read_trajectory_csv(const std::filesystem::path& file);

}  // namespace paraplan
