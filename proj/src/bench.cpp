#include "swarm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "swarm/obstacle.hpp"

#ifndef SWARM_SCENARIO_DIR
#define SWARM_SCENARIO_DIR "scenarios"
#endif

namespace swarm {

namespace {

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

class TrialAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_field(const std::string& tok, const std::filesystem::path& file) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw std::runtime_error(file.string() + ": bad number '" + tok + "'");
  }
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

void TrialConfig::validate() const {
  if (!(time_limit > 0.0)) throw std::invalid_argument("time_limit must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  scenario.validate();
  params.validate();
  (void)params.vehicle(scenario);
}

TrialConfig make_trial_config(const Scenario& sc, ControllerKind kind, std::uint64_t seed,
                              const std::vector<std::pair<std::string, std::string>>& overrides,
                              double time_limit, double dt) {
  TrialConfig cfg;
  cfg.scenario = sc;
  cfg.controller = kind;
  cfg.seed = seed;
  cfg.time_limit = time_limit;
  cfg.dt = dt;
  cfg.params = default_params();
  cfg.params.set_dt(dt);
  for (const auto& [k, v] : overrides) apply_override(cfg.params, k, v);
  cfg.overrides = overrides;
  cfg.validate();
  return cfg;
}

std::uint64_t config_hash(const TrialConfig& cfg) {
  std::ostringstream out;
  out << "scenario=" << cfg.scenario.name << ":" << hex64(content_hash(cfg.scenario)) << "\n";
  out << "controller=" << to_string(cfg.controller) << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "time_limit=" << format_double(cfg.time_limit) << "\n";
  out << "dt=" << format_double(cfg.dt) << "\n";
  out << describe(cfg.params);
  return fnv1a(out.str());
}

TrialResult run_trial(const TrialConfig& cfg) {
  TrialResult res;
  res.seed = cfg.seed;
  res.config_hash = config_hash(cfg);

  const Scenario& sc = cfg.scenario;
  const VehicleParams vp = cfg.params.vehicle(sc);
  SimParams params = cfg.params;
  params.set_dt(cfg.dt);

  WorldState world;
  world.poses = spawn_swarm(sc, cfg.seed, vp);
  const std::size_t n = world.poses.size();

  SwarmSnapshot snap;
  snap.states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    snap.states[i].q = effective_center(world.poses[i], vp);
    snap.states[i].theta = world.poses[i].theta;
  }

  auto controller = make_controller(cfg.controller, params.ctrl, n);
  const long max_steps = std::max(1L, std::lround(cfg.time_limit / cfg.dt));
  std::vector<UnicycleCmd> cmds(n);

  auto record = [&](long step, const std::vector<bool>* fired) {
    if (!cfg.record_trajectory) return;
    for (std::size_t i = 0; i < n; ++i) {
      const RobotState& s = snap.states[i];
      res.trajectory.push_back({step, i, s.q.x, s.q.y, s.theta, norm(s.v_cmd), norm(s.v_obs),
                                s.integral, fired != nullptr && (*fired)[i]});
    }
  };

  try {
    long step = 0;
    for (; step < max_steps; ++step) {
      ControllerOutput out = controller->step(snap, sc.goal, step);
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_finite(out.v_cmd[i])) {
          throw TrialAbort("non-finite command for robot " + std::to_string(i) + " at step " +
                           std::to_string(step));
        }
        snap.states[i].v_cmd = out.v_cmd[i];
        snap.states[i].integral = out.detector_integrals[i];
        cmds[i] = to_unicycle(out.v_cmd[i], world.poses[i].theta, vp);
      }
      record(step, &out.detected);

      const std::vector<Vec2> before = effective_centers(world, vp);
      world = world_step(world, cmds, sc, vp, cfg.dt, params.contact);
      const std::vector<Vec2> after = effective_centers(world, vp);
      const double pen = max_penetration(after, sc, vp.radius());
      if (pen > kPenetrationTolerance) {
        throw TrialAbort("penetration " + format_double(pen) + " m at step " +
                         std::to_string(step));
      }

      std::vector<Vec2> v_obs(n);
      for (std::size_t i = 0; i < n; ++i) {
        v_obs[i] = observe_velocity(after[i], before[i], cfg.dt);
        snap.states[i].q = after[i];
        snap.states[i].v_obs = v_obs[i];
        snap.states[i].theta = world.poses[i].theta;
      }
      if (goal_reached(after, sc, v_obs)) {
        res.reached = true;
        res.arrival_time = world.sim_time;
        ++step;
        break;
      }
    }
    res.steps = step;
    record(step, nullptr);
  } catch (const TrialAbort& e) {
    res.reached = false;
    res.arrival_time.reset();
    res.diagnostic = e.what();
  }
  res.collision_points = controller->collisions().points();
  return res;
}

AggregateStats aggregate(std::vector<TrialRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const TrialRow& a, const TrialRow& b) { return a.seed < b.seed; });
  AggregateStats s;
  s.n_trials = rows.size();
  double total = 0.0;
  for (const auto& r : rows) {
    if (r.reached) {
      ++s.n_success;
      total += *r.arrival_time;
    }
  }
  s.reachability =
      s.n_trials == 0 ? 0.0 : static_cast<double>(s.n_success) / static_cast<double>(s.n_trials);
  if (s.n_success > 0) s.mean_time = total / static_cast<double>(s.n_success);
  s.rows = std::move(rows);
  return s;
}

AggregateStats run_seeds(const TrialConfig& tmpl, const std::vector<std::uint64_t>& seeds,
                         int threads) {
  std::vector<TrialRow> rows(seeds.size());
  const long n = static_cast<long>(seeds.size());
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (long k = 0; k < n; ++k) {
    TrialConfig cfg = tmpl;
    cfg.seed = seeds[static_cast<std::size_t>(k)];
    cfg.record_trajectory = false;
    TrialRow& row = rows[static_cast<std::size_t>(k)];
    row.seed = cfg.seed;
    try {
      const TrialResult r = run_trial(cfg);
      row.reached = r.reached;
      row.arrival_time = r.arrival_time;
      row.n_collisions = r.collision_points.size();
      row.diagnostic = r.diagnostic;
    } catch (const std::exception& e) {
      row.reached = false;
      row.diagnostic = e.what();
    }
  }
  (void)threads;
  return aggregate(std::move(rows));
}

AggregateStats run_batch(const TrialConfig& tmpl, std::size_t n, std::uint64_t base_seed,
                         int threads) {
  if (n < 1) throw std::invalid_argument("batch needs at least one trial");
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t k = 0; k < n; ++k) seeds[k] = base_seed + k;
  return run_seeds(tmpl, seeds, threads);
}

std::vector<SweepRow> sweep(const TrialConfig& tmpl, const std::vector<SweepAxis>& grid,
                            std::size_t trials, std::uint64_t base_seed, int threads) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  for (const auto& axis : grid) {
    if (axis.values.empty()) throw std::invalid_argument("sweep axis '" + axis.key + "' is empty");
  }
  std::vector<SweepRow> rows;
  std::vector<std::size_t> at(grid.size(), 0);
  for (;;) {
    SweepRow row;
    TrialConfig cfg = tmpl;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      row.settings.emplace_back(grid[a].key, grid[a].values[at[a]]);
    }
    try {
      for (const auto& [k, v] : row.settings) {
        apply_override(cfg.params, k, v);
        cfg.overrides.emplace_back(k, v);
      }
      cfg.validate();
      row.stats = run_batch(cfg, trials, base_seed, threads);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));

    std::size_t a = grid.size();
    while (a > 0) {
      --a;
      if (++at[a] < grid[a].values.size()) break;
      at[a] = 0;
      if (a == 0) return rows;
    }
  }
}

TimingRow time_controller(std::size_t n_robots, std::size_t n_points, int reps,
                          const SphParams& p, std::uint64_t seed) {
  if (n_robots < 1) throw std::invalid_argument("time_controller needs n_robots >= 1");
  std::mt19937_64 rng(seed);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  constexpr double kField = 0.9;

  const int warmup = 2;
  // A fresh state per repetition, as a running controller would see; reusing
  // one state lets small swarms replay the same branch pattern every time.
  std::vector<SwarmSnapshot> snaps(static_cast<std::size_t>(reps + warmup));
  for (auto& snap : snaps) {
    snap.states.resize(n_robots);
    for (auto& s : snap.states) {
      s.q = {kField * u01(), kField * u01()};
      s.v_cmd = {0.1 * (u01() - 0.5), 0.1 * (u01() - 0.5)};
      s.v_obs = s.v_cmd;  // perfect tracking: no detections during timing
    }
  }
  DetectorParams dp;
  dp.v_max = p.v_max;
  CollisionMap base;
  for (std::size_t k = 0; k < n_points; ++k) {
    base.insert({{kField * u01(), kField * u01()}, 0, 0}, 0.0);
  }
  const Vec2 goal{0.45, 0.45};

#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  std::vector<double> ms;
  for (int r = 0; r < reps + warmup; ++r) {
    CollisionMap map = base;
    const SwarmSnapshot& snap = snaps[static_cast<std::size_t>(r)];
    const auto t0 = std::chrono::steady_clock::now();
    const ControllerOutput out = controller_step(snap, map, goal, p, dp, 0);
    const auto t1 = std::chrono::steady_clock::now();
    if (out.v_cmd.size() != n_robots) throw std::logic_error("controller output size mismatch");
    if (r >= warmup) ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
  std::sort(ms.begin(), ms.end());
  TimingRow row;
  row.n_robots = n_robots;
  row.min_ms = ms.front();
  row.median_ms = ms.size() % 2 == 1 ? ms[ms.size() / 2]
                                     : 0.5 * (ms[ms.size() / 2 - 1] + ms[ms.size() / 2]);
  return row;
}

double loglog_slope(const std::vector<TimingRow>& rows) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.n_robots));
    const double y = std::log(r.median_ms);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ExportMeta export_meta(const TrialConfig& cfg) {
  return {cfg.scenario.name, content_hash(cfg.scenario), std::string(to_string(cfg.controller)),
          cfg.time_limit, cfg.dt, cfg.overrides};
}

void export_trial(const TrialResult& res, const ExportMeta& meta, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());

  auto open = [](const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    return out;
  };
  auto check = [](std::ofstream& out, const std::filesystem::path& file) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + file.string());
  };

  {
    const auto file = dir / "trajectory.csv";
    auto out = open(file);
    out << "step,robot,x,y,theta,v_cmd,v_obs,integral,fired\n";
    for (const auto& r : res.trajectory) {
      out << r.step << ',' << r.robot << ',' << format_double(r.x) << ',' << format_double(r.y)
          << ',' << format_double(r.theta) << ',' << format_double(r.v_cmd) << ','
          << format_double(r.v_obs) << ',' << format_double(r.integral) << ',' << (r.fired ? 1 : 0)
          << '\n';
    }
    check(out, file);
  }
  {
    const auto file = dir / "collisions.csv";
    auto out = open(file);
    out << "index,step,robot,x,y\n";
    for (std::size_t k = 0; k < res.collision_points.size(); ++k) {
      const auto& c = res.collision_points[k];
      out << k << ',' << c.step << ',' << c.robot << ',' << format_double(c.c.x) << ','
          << format_double(c.c.y) << '\n';
    }
    check(out, file);
  }
  {
    nlohmann::ordered_json j;
    j["tool"] = "swarmbench";
    j["version"] = kToolVersion;
    j["scenario"] = {{"name", meta.scenario_name}, {"content_hash", hex64(meta.scenario_hash)}};
    j["controller"] = meta.controller;
    j["seed"] = res.seed;
    j["time_limit"] = meta.time_limit;
    j["dt"] = meta.dt;
    nlohmann::ordered_json ov = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.overrides) ov[k] = v;
    j["overrides"] = ov;
    j["config_hash"] = hex64(res.config_hash);
    j["reached"] = res.reached;
    j["arrival_time"] = res.arrival_time ? nlohmann::ordered_json(*res.arrival_time) : nullptr;
    j["steps"] = res.steps;
    j["n_collision_points"] = res.collision_points.size();
    j["diagnostic"] = res.diagnostic;
    const auto file = dir / "summary.json";
    auto out = open(file);
    out << j.dump(2) << '\n';
    check(out, file);
  }
}

std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& file) {
  std::vector<TrajectoryRow> out;
  for (const auto& c : read_csv(file)) {
    if (c.size() != 9) throw std::runtime_error(file.string() + ": expected 9 columns");
    TrajectoryRow r;
    r.step = std::stol(c[0]);
    r.robot = std::stoul(c[1]);
    r.x = parse_field(c[2], file);
    r.y = parse_field(c[3], file);
    r.theta = parse_field(c[4], file);
    r.v_cmd = parse_field(c[5], file);
    r.v_obs = parse_field(c[6], file);
    r.integral = parse_field(c[7], file);
    r.fired = c[8] == "1";
    out.push_back(r);
  }
  return out;
}

std::vector<CollisionPoint> read_collisions(const std::filesystem::path& file) {
  std::vector<CollisionPoint> out;
  for (const auto& c : read_csv(file)) {
    if (c.size() != 5) throw std::runtime_error(file.string() + ": expected 5 columns");
    out.push_back({{parse_field(c[3], file), parse_field(c[4], file)}, std::stol(c[1]),
                   std::stoul(c[2])});
  }
  return out;
}

std::filesystem::path resolve_scenario_path(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("SWARM_SCENARIO_DIR")) dirs.emplace_back(env);
  dirs.emplace_back(SWARM_SCENARIO_DIR);
  for (const auto& d : dirs) {
    const auto candidate = d / (name_or_path + ".scn");
    if (std::filesystem::is_regular_file(candidate)) return candidate;
  }
  throw std::runtime_error("scenario '" + name_or_path + "' not found");
}

}  // namespace swarm
