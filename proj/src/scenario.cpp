#include "paraplan/scenario.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace paraplan {

namespace {

constexpr double kPi = std::numbers::pi;

double kmh(double v) { return v / 3.6; }

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::uint64_t> default_seeds() {
  return {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
}

ScenarioSpec base_spec(std::string name) {
  ScenarioSpec spec;
  spec.name = std::move(name);
  spec.mission.name = spec.name;
  spec.seeds = default_seeds();
  return spec;
}

std::vector<ObstaclePoint> road_bound_points() {
  // Bound lines are stated; a 5 m spacing along them is an authoring choice.
  std::vector<ObstaclePoint> pts;
  for (int i = 0; i <= 14; ++i) {
    const double x = -10.0 + 5.0 * i;
    pts.push_back({x, -1.75, 0.0, 0.0});
    pts.push_back({x, 5.25, 0.0, 0.0});
  }
  return pts;
}

std::vector<ObstaclePoint> oncoming_vehicle_points() {
  // Chassis corners of the oncoming vehicle (CoG at x=40 on the EV lane,
  // heading pi, 20 km/h), using the same chassis dimensions as the EV.
  const double speed = kmh(20.0);
  const double h = kPi;
  return {
      {38.2, -1.0, h, speed},
      {38.2, 1.0, h, speed},
      {42.0, -1.0, h, speed},
      {42.0, 1.0, h, speed},
  };
}

std::vector<ObstaclePoint> parking_lot_points() {
  // Transcribed from the plotted lot layout: 20 static points.
  const std::vector<Vec2> xy = {
      {-6.5, -2}, {-5.5, -2}, {-4.5, -2}, {-3.5, -2}, {-2.5, -2},
      {-2.5, -7}, {-1.25, -7}, {0, -7},   {1.25, -7}, {2.5, -7},
      {2.5, -2},  {3.5, -2},  {4.5, -2},  {5.5, -2},  {6.5, -2},
      {-4, 6},    {-2, 6},    {0, 6},     {2, 6},     {4, 6},
  };
  std::vector<ObstaclePoint> pts;
  pts.reserve(xy.size());
  for (const Vec2& p : xy) pts.push_back({p.x, p.y, 0.0, 0.0});
  return pts;
}

// Writer-side provenance comments for exported builtin scenarios.
struct ProvenanceNotes {
  const char* waypoints = nullptr;
  const char* static_points = nullptr;
  const char* dynamic_points = nullptr;
};

const std::map<std::string, ProvenanceNotes>& provenance_notes() {
  static const std::map<std::string, ProvenanceNotes> notes = {
      {"exp3_explicit",
       {nullptr, "// 5 m spacing along the stated bound lines is an authoring choice",
        "// corner points derived from the stated obstacle pose and the chassis size"}},
      {"exp3_auxiliary",
       {"// auxiliary lane setpoint placement is an authoring choice",
        "// 5 m spacing along the stated bound lines is an authoring choice", nullptr}},
      {"exp4", {"// waypoint poses transcribed from the plotted mission layout", nullptr, nullptr}},
      {"exp5_3wp",
       {"// waypoint poses transcribed from the plotted mission layout",
        "// lot points transcribed from the plotted figure", nullptr}},
      {"exp5_2wp",
       {"// waypoint poses transcribed from the plotted mission layout",
        "// lot points transcribed from the plotted figure", nullptr}},
  };
  return notes;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"exp1",          "exp2",     "exp3_explicit", "exp3_auxiliary",
          "exp4",          "exp5_3wp", "exp5_2wp"};
}

ScenarioSpec builtin_scenario(const std::string& name) {
  if (name == "exp1") {
    // Turn-around in place: same position, opposite heading, zero speed.
    ScenarioSpec spec = base_spec(name);
    spec.mission.initial_state = {0.0, 0.0, 0.0, 0.0};
    spec.mission.waypoints = {{0.0, 0.0, kPi, 0.0}};
    spec.mission.time_limit = 20.0;
    return spec;
  }
  if (name == "exp2") {
    ScenarioSpec spec = base_spec(name);
    spec.mission.initial_state = {0.0, 0.0, 0.0, kmh(50.0)};
    spec.mission.waypoints = {{50.0, 0.0, 0.0, kmh(50.0)}};
    spec.mission.time_limit = 15.0;
    return spec;
  }
  if (name == "exp3_explicit") {
    ScenarioSpec spec = base_spec(name);
    spec.mission.initial_state = {0.0, 0.0, 0.0, kmh(50.0)};
    spec.mission.waypoints = {{50.0, 0.0, 0.0, kmh(50.0)}};
    spec.mission.static_points = road_bound_points();
    spec.mission.dynamic_points = oncoming_vehicle_points();
    spec.mission.time_limit = 20.0;
    return spec;
  }
  if (name == "exp3_auxiliary") {
    // The oncoming vehicle is dropped from sensing; an auxiliary setpoint in
    // the neighboring lane routes the EV around where it will be.
    ScenarioSpec spec = base_spec(name);
    spec.mission.initial_state = {0.0, 0.0, 0.0, kmh(50.0)};
    spec.mission.waypoints = {{25.0, 3.5, 0.0, kmh(50.0)},
                              {50.0, 0.0, 0.0, kmh(50.0)}};
    spec.mission.static_points = road_bound_points();
    spec.mission.time_limit = 20.0;
    return spec;
  }
  if (name == "exp4") {
    ScenarioSpec spec = base_spec(name);
    spec.mission.initial_state = {0.0, 0.0, 0.0, 0.0};
    spec.mission.waypoints = {{10.0, 0.0, kPi / 2.0, 0.0},
                              {10.0, 10.0, kPi, 0.0},
                              {0.0, 10.0, 3.0 * kPi / 2.0, 0.0},
                              {0.0, 0.0, 0.0, 0.0}};
    spec.mission.time_limit = 60.0;
    return spec;
  }
  if (name == "exp5_3wp") {
    ScenarioSpec spec = base_spec(name);
    spec.mission.initial_state = {0.0, 2.0, 0.0, 0.0};
    spec.mission.waypoints = {{5.0, 2.0, 0.0, 0.0},
                              {0.0, 0.0, kPi / 2.0, 0.0},
                              {0.0, -5.0, kPi / 2.0, 0.0}};
    spec.mission.static_points = parking_lot_points();
    spec.mission.time_limit = 40.0;
    return spec;
  }
  if (name == "exp5_2wp") {
    ScenarioSpec spec = base_spec(name);
    spec.mission.initial_state = {0.0, 2.0, 0.0, 0.0};
    spec.mission.waypoints = {{0.0, 0.0, kPi / 2.0, 0.0},
                              {0.0, -5.0, kPi / 2.0, 0.0}};
    spec.mission.static_points = parking_lot_points();
    spec.mission.time_limit = 40.0;
    return spec;
  }
  std::string msg = "unknown scenario '" + name + "'; valid names:";
  for (const std::string& n : builtin_scenario_names()) msg += " " + n;
  throw UsageError(msg);
}

namespace {

void write_vec4(std::ostream& out, double a, double b, double c, double d) {
  out << '[' << num(a) << ", " << num(b) << ", " << num(c) << ", " << num(d)
      << ']';
}

void write_point_array(std::ostream& out, const char* key,
                       const std::vector<ObstaclePoint>& pts,
                       const char* note) {
  out << "  \"" << key << "\": [";
  if (note != nullptr && !pts.empty()) out << "  " << note;
  out << '\n';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << "    ";
    write_vec4(out, pts[i].x, pts[i].y, pts[i].heading, pts[i].speed);
    out << (i + 1 < pts.size() ? ",\n" : "\n");
  }
  out << "  ]";
}

}  // namespace

std::string serialize_scenario(const ScenarioSpec& spec) {
  const auto& notes_map = provenance_notes();
  ProvenanceNotes notes;
  if (auto it = notes_map.find(spec.name); it != notes_map.end()) {
    notes = it->second;
  }

  std::ostringstream out;
  out << "{\n";
  out << "  \"name\": \"" << spec.name << "\",\n";
  out << "  \"arch\": [";
  for (std::size_t i = 0; i < spec.arch.layer_sizes.size(); ++i) {
    out << (i ? ", " : "") << spec.arch.layer_sizes[i];
  }
  out << "],\n";
  out << "  \"seeds\": [";
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    out << (i ? ", " : "") << spec.seeds[i];
  }
  out << "],\n";
  out << "  \"time_limit\": " << num(spec.mission.time_limit) << ",\n";
  out << "  \"initial_state\": ";
  write_vec4(out, spec.mission.initial_state.x, spec.mission.initial_state.y,
             spec.mission.initial_state.phi, spec.mission.initial_state.v);
  out << ",\n";
  out << "  \"range_field\": { \"ahead\": " << num(spec.mission.range_field.ahead)
      << ", \"behind\": " << num(spec.mission.range_field.behind)
      << ", \"half_width\": " << num(spec.mission.range_field.half_width)
      << " },\n";
  const PlannerConfig& pc = spec.planner;
  out << "  \"planner\": { \"H\": " << pc.H << ", \"restarts\": " << pc.n_restarts
      << ", \"iter_max\": " << pc.n_iter_max << ", \"samples\": " << pc.n_candidates
      << ", \"obst_pts\": " << pc.n_obst_pts << ", \"sigma_log\": ["
      << num(pc.sigma_log_low) << ", " << num(pc.sigma_log_high)
      << "], \"early_exit\": " << (pc.early_exit ? "true" : "false") << " },\n";
  out << "  \"tolerance\": { \"xi\": " << num(pc.tol.eps_xi) << ", \"eta\": "
      << num(pc.tol.eps_eta) << ", \"phi\": " << num(pc.tol.eps_phi)
      << ", \"v\": " << num(pc.tol.eps_v) << " },\n";
  out << "  \"norm\": { \"xi\": " << num(spec.norm.d_xi) << ", \"eta\": "
      << num(spec.norm.d_eta) << ", \"phi\": " << num(spec.norm.d_phi)
      << ", \"v\": " << num(spec.norm.d_v) << " },\n";

  out << "  \"waypoints\": [";
  if (notes.waypoints != nullptr) out << "  " << notes.waypoints;
  out << '\n';
  for (std::size_t i = 0; i < spec.mission.waypoints.size(); ++i) {
    const GoalSetpoint& g = spec.mission.waypoints[i];
    out << "    ";
    write_vec4(out, g.x, g.y, g.phi, g.v);
    out << (i + 1 < spec.mission.waypoints.size() ? ",\n" : "\n");
  }
  out << "  ],\n";

  write_point_array(out, "static_points", spec.mission.static_points,
                    notes.static_points);
  out << ",\n";
  write_point_array(out, "dynamic_points", spec.mission.dynamic_points,
                    notes.dynamic_points);
  out << "\n}\n";
  return out.str();
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << serialize_scenario(spec);
}

namespace {

using nlohmann::json;

GoalSetpoint parse_vec4_goal(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
          j.at(3).get<double>()};
}

ObstaclePoint parse_vec4_point(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
          j.at(3).get<double>()};
}

}  // namespace

ScenarioSpec load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw UsageError("cannot open scenario file: " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed scenario file " + file.string() + ": " + e.what());
  }

  ScenarioSpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    spec.mission.name = spec.name;
    spec.arch.layer_sizes = j.value("arch", std::vector<int>{5, 2, 2});
    spec.seeds = j.value("seeds", default_seeds());
    spec.mission.time_limit = j.value("time_limit", 60.0);
    if (j.contains("initial_state")) {
      const json& z = j.at("initial_state");
      spec.mission.initial_state = {z.at(0).get<double>(), z.at(1).get<double>(),
                                    z.at(2).get<double>(), z.at(3).get<double>()};
    }
    if (j.contains("range_field")) {
      const json& r = j.at("range_field");
      spec.mission.range_field.ahead = r.value("ahead", 30.0);
      spec.mission.range_field.behind = r.value("behind", 10.0);
      spec.mission.range_field.half_width = r.value("half_width", 10.0);
    }
    if (j.contains("planner")) {
      const json& p = j.at("planner");
      spec.planner.H = p.value("H", spec.planner.H);
      spec.planner.n_restarts = p.value("restarts", spec.planner.n_restarts);
      spec.planner.n_iter_max = p.value("iter_max", spec.planner.n_iter_max);
      spec.planner.n_candidates = p.value("samples", spec.planner.n_candidates);
      spec.planner.n_obst_pts = p.value("obst_pts", spec.planner.n_obst_pts);
      if (p.contains("sigma_log")) {
        spec.planner.sigma_log_low = p.at("sigma_log").at(0).get<double>();
        spec.planner.sigma_log_high = p.at("sigma_log").at(1).get<double>();
      }
      spec.planner.early_exit = p.value("early_exit", false);
    }
    if (j.contains("tolerance")) {
      const json& t = j.at("tolerance");
      spec.planner.tol.eps_xi = t.value("xi", spec.planner.tol.eps_xi);
      spec.planner.tol.eps_eta = t.value("eta", spec.planner.tol.eps_eta);
      spec.planner.tol.eps_phi = t.value("phi", spec.planner.tol.eps_phi);
      spec.planner.tol.eps_v = t.value("v", spec.planner.tol.eps_v);
    }
    if (j.contains("norm")) {
      const json& n = j.at("norm");
      spec.norm.d_xi = n.value("xi", spec.norm.d_xi);
      spec.norm.d_eta = n.value("eta", spec.norm.d_eta);
      spec.norm.d_phi = n.value("phi", spec.norm.d_phi);
      spec.norm.d_v = n.value("v", spec.norm.d_v);
    }
    for (const json& w : j.value("waypoints", json::array())) {
      spec.mission.waypoints.push_back(parse_vec4_goal(w));
    }
    for (const json& p : j.value("static_points", json::array())) {
      spec.mission.static_points.push_back(parse_vec4_point(p));
    }
    for (const json& p : j.value("dynamic_points", json::array())) {
      spec.mission.dynamic_points.push_back(parse_vec4_point(p));
    }
  } catch (const json::exception& e) {
    throw UsageError("invalid scenario file " + file.string() + ": " + e.what());
  }

  spec.arch.validate();
  spec.mission.validate();
  spec.planner.validate();
  return spec;
}

std::string seed_csv_name(const std::string& scenario, std::uint64_t seed) {
  return scenario + "_seed" + std::to_string(seed) + ".csv";
}

std::string seed_xy_name(const std::string& scenario, std::uint64_t seed) {
  return scenario + "_seed" + std::to_string(seed) + "_xy.dat";
}

std::string report_name(const std::string& scenario) {
  return scenario + "_report.json";
}

std::string scenario_file_name(const std::string& scenario) {
  return scenario + "_scenario.json";
}

void write_trajectory_csv(const std::filesystem::path& file,
                          const SimulationLog& log, double T_s) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "t_s,x_m,y_m,phi_rad,v_mps,a0,a1,delta_rad,waypoint_idx,"
         "planner_success,plan_time_s\n";
  for (const TickRecord& r : log.records) {
    out << num(r.t * T_s) << ',' << num(r.state.x) << ',' << num(r.state.y)
        << ',' << num(r.state.phi) << ',' << num(r.state.v) << ','
        << num(r.action.a0) << ',' << num(r.action.a1) << ',' << num(r.delta)
        << ',' << r.waypoint_idx << ',' << (r.planner_success ? 1 : 0) << ','
        << num(r.plan_time) << '\n';
  }
}

std::vector<CsvRow> read_trajectory_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty trajectory file " + file.string());
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 11> f{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 11; ++i) {
      const auto res = std::from_chars(p, end, f[i]);
      if (res.ec != std::errc{}) {
        throw std::runtime_error("malformed CSV row in " + file.string());
      }
      p = res.ptr;
      if (i < 10) {
        if (p == end || *p != ',') {
          throw std::runtime_error("malformed CSV row in " + file.string());
        }
        ++p;
      }
    }
    rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7],
                    static_cast<int>(f[8]), f[9] != 0.0, f[10]});
  }
  return rows;
}

namespace {

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  a.min = values.front();
  a.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    a.min = std::min(a.min, v);
    a.max = std::max(a.max, v);
    sum += v;
  }
  a.avg = sum / static_cast<double>(values.size());
  return a;
}

}  // namespace

SweepReport run_sweep(const ScenarioSpec& spec,
                      const std::filesystem::path& out_dir, int threads) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path report_path = out_dir / report_name(spec.name);
  std::ofstream report_stream(report_path, std::ios::binary);
  if (!report_stream) {
    throw std::runtime_error("output directory not writable: " + out_dir.string());
  }
  save_scenario(spec, out_dir / scenario_file_name(spec.name));

  const int n_seeds = static_cast<int>(spec.seeds.size());
  std::vector<SimulationLog> logs(n_seeds);

  if (n_seeds > 0) {
    const int missions = std::min(n_seeds, std::max(1, threads));
    PlannerConfig cfg = spec.planner;
    cfg.threads = std::max(1, threads / missions);

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_seeds) return;
        try {
          logs[i] = run_mission(spec.mission, cfg, spec.arch, spec.seeds[i],
                                {}, spec.norm);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < missions; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SweepReport report;
  report.scenario = spec.name;
  const VehicleParams params;
  std::vector<double> paths, v_mins, v_avgs, v_maxs, taus;
  for (int i = 0; i < n_seeds; ++i) {
    const MissionStats& s = logs[i].stats;
    report.per_seed.push_back({spec.seeds[i], s});
    if (s.completed) ++report.success_count;
    paths.push_back(s.path_length);
    v_mins.push_back(s.v_min_kmh);
    v_avgs.push_back(s.v_avg_kmh);
    v_maxs.push_back(s.v_max_kmh);
    taus.push_back(s.tau_avg);

    write_trajectory_csv(out_dir / seed_csv_name(spec.name, spec.seeds[i]),
                         logs[i], params.T_s);
    std::ofstream xy(out_dir / seed_xy_name(spec.name, spec.seeds[i]),
                     std::ios::binary);
    for (const TickRecord& r : logs[i].records) {
      xy << num(r.state.x) << ' ' << num(r.state.y) << '\n';
    }
  }

  report.path_length_m = aggregate(paths);
  report.tau_s = aggregate(taus);
  report.v_kmh.min = aggregate(v_mins).min;
  report.v_kmh.avg = aggregate(v_avgs).avg;
  report.v_kmh.max = aggregate(v_maxs).max;

  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  j["success_count"] = report.success_count;
  j["seed_count"] = n_seeds;
  j["aggregates"] = {
      {"path_length_m",
       {{"min", report.path_length_m.min},
        {"avg", report.path_length_m.avg},
        {"max", report.path_length_m.max}}},
      {"v_kmh",
       {{"min", report.v_kmh.min},
        {"avg", report.v_kmh.avg},
        {"max", report.v_kmh.max}}},
      {"tau_s",
       {{"min", report.tau_s.min},
        {"avg", report.tau_s.avg},
        {"max", report.tau_s.max}}},
  };
  j["per_seed"] = nlohmann::ordered_json::array();
  for (const SeedResult& r : report.per_seed) {
    nlohmann::ordered_json row;
    row["seed"] = r.seed;
    row["completed"] = r.stats.completed;
    row["ticks"] = r.stats.ticks;
    row["path_length_m"] = r.stats.path_length;
    row["v_min_kmh"] = r.stats.v_min_kmh;
    row["v_avg_kmh"] = r.stats.v_avg_kmh;
    row["v_max_kmh"] = r.stats.v_max_kmh;
    row["y_abs_max_m"] = r.stats.y_abs_max;
    row["tau_avg_s"] = r.stats.tau_avg;
    j["per_seed"].push_back(row);
  }
  report_stream << j.dump(2) << '\n';
  return report;
}

}  // namespace paraplan
