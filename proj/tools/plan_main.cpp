#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "paraplan/scenario.hpp"
#include "paraplan/selfcheck.hpp"

namespace {

using namespace paraplan;

std::vector<std::uint64_t> parse_seeds(const std::string& expr) {
  std::vector<std::uint64_t> seeds;
  const auto range_pos = expr.find("..");
  if (range_pos != std::string::npos) {
    const std::uint64_t lo = std::stoull(expr.substr(0, range_pos));
    const std::uint64_t hi = std::stoull(expr.substr(range_pos + 2));
    if (hi < lo) throw UsageError("seed range must be ascending: " + expr);
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t start = 0;
  while (start <= expr.size()) {
    const std::size_t comma = expr.find(',', start);
    const std::string tok = expr.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw UsageError("no seeds in: " + expr);
  return seeds;
}

std::vector<int> parse_arch(const std::string& expr) {
  std::vector<int> sizes;
  std::size_t start = 0;
  while (start <= expr.size()) {
    const std::size_t comma = expr.find(',', start);
    const std::string tok = expr.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) sizes.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (sizes.empty()) throw UsageError("no layer sizes in: " + expr);
  return sizes;
}

ScenarioSpec resolve_scenario(const std::string& name_or_file) {
  const auto names = builtin_scenario_names();
  for (const std::string& n : names) {
    if (n == name_or_file) return builtin_scenario(n);
  }
  if (std::filesystem::exists(name_or_file)) {
    return load_scenario(name_or_file);
  }
  return builtin_scenario(name_or_file);  // throws with the valid-name list
}

int default_threads() {
  if (const char* env = std::getenv("PLAN_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

void print_report(const SweepReport& report) {
  std::cout << "scenario " << report.scenario << ": " << report.success_count
            << "/" << report.per_seed.size() << " missions completed\n";
  for (const SeedResult& r : report.per_seed) {
    std::cout << "  seed " << r.seed << ": "
              << (r.stats.completed ? "completed" : "timed out") << ", P="
              << r.stats.path_length << " m, v=" << r.stats.v_min_kmh << "/"
              << r.stats.v_avg_kmh << "/" << r.stats.v_max_kmh << " km/h"
              << ", |y|max=" << r.stats.y_abs_max << " m, tau_avg="
              << r.stats.tau_avg << " s, ticks=" << r.stats.ticks << "\n";
  }
  if (!report.per_seed.empty()) {
    std::cout << "  P min/avg/max = " << report.path_length_m.min << "/"
              << report.path_length_m.avg << "/" << report.path_length_m.max
              << " m\n"
              << "  v min/avg/max = " << report.v_kmh.min << "/"
              << report.v_kmh.avg << "/" << report.v_kmh.max << " km/h\n"
              << "  tau min/avg/max = " << report.tau_s.min << "/"
              << report.tau_s.avg << "/" << report.tau_s.max << " s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online sampling in controller parameter space for "
               "collision-free vehicle motion planning"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Simulate a scenario over a seed sweep");
  std::string scenario_arg;
  std::string seeds_expr;
  std::string arch_expr;
  std::string out_dir = "out";
  int samples = 0;
  int restarts = 0;
  int threads = default_threads();
  run->add_option("--scenario", scenario_arg, "Builtin scenario name or scenario file")
      ->required();
  run->add_option("--seeds", seeds_expr, "Seed list: '0..9' or '0,3,5'");
  run->add_option("--samples", samples, "Candidates per sampler iteration");
  run->add_option("--restarts", restarts, "Sampler restarts per tick");
  run->add_option("--threads", threads, "Worker threads (default $PLAN_THREADS or 1)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--arch", arch_expr, "Network layer sizes, e.g. 5,10,2");

  auto* list = app.add_subcommand("list", "List builtin scenarios");

  auto* verify =
      app.add_subcommand("verify", "Run the property and oracle self-checks");

  auto* export_cmd =
      app.add_subcommand("export", "Write a scenario definition file");
  std::string export_scenario;
  std::string export_path;
  export_cmd->add_option("--scenario", export_scenario, "Builtin scenario name")
      ->required();
  export_cmd->add_option("--out", export_path, "Destination file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const std::string& name : paraplan::builtin_scenario_names()) {
        std::cout << name << "\n";
      }
      return 0;
    }

    if (verify->parsed()) {
      bool all_pass = true;
      for (const paraplan::CheckResult& check : paraplan::run_selfchecks()) {
        std::cout << (check.pass ? "PASS " : "FAIL ") << check.name << ": "
                  << check.detail << "\n";
        all_pass = all_pass && check.pass;
      }
      return all_pass ? 0 : 1;
    }

    if (export_cmd->parsed()) {
      paraplan::save_scenario(paraplan::builtin_scenario(export_scenario),
                              export_path);
      std::cout << "wrote " << export_path << "\n";
      return 0;
    }

    paraplan::ScenarioSpec spec = resolve_scenario(scenario_arg);
    if (!seeds_expr.empty()) spec.seeds = parse_seeds(seeds_expr);
    if (samples > 0) spec.planner.n_candidates = samples;
    if (restarts > 0) spec.planner.n_restarts = restarts;
    if (!arch_expr.empty()) {
      spec.arch.layer_sizes = parse_arch(arch_expr);
      spec.arch.validate();
    }

    const paraplan::SweepReport report =
        paraplan::run_sweep(spec, out_dir, threads);
    print_report(report);
    const bool all_completed =
        report.success_count == static_cast<int>(report.per_seed.size());
    return all_completed ? 0 : 1;
  } catch (const paraplan::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
