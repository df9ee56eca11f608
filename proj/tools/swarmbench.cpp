#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "swarm/bench.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Common {
  std::string scenario = "entry";
  std::string controller = "ours";
  std::uint64_t seed = 0;
  double dt = 0.1;
  double time_limit = 100.0;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c, bool with_controller = true) {
  cmd->add_option("--scenario", c.scenario, "Scenario name or path")->capture_default_str();
  if (with_controller) {
    cmd->add_option("--controller", c.controller, "ours|sph|bound|rvo")->capture_default_str();
  }
  cmd->add_option("--seed", c.seed, "Seed (base seed for batches)")->capture_default_str();
  cmd->add_option("--dt", c.dt, "Control period [s]")->capture_default_str();
  cmd->add_option("--time-limit", c.time_limit, "Trial time limit [s]")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--set", c.sets, "Parameter override key=value (repeatable)");
}

std::vector<std::pair<std::string, std::string>> overrides_of(const Common& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : c.sets) out.push_back(swarm::split_override(s));
  return out;
}

swarm::TrialConfig config_of(const Common& c) {
  const auto kind = swarm::parse_controller_kind(c.controller);
  if (!kind) throw std::invalid_argument("unknown controller '" + c.controller + "'");
  const swarm::Scenario sc = swarm::load_scenario(swarm::resolve_scenario_path(c.scenario));
  return swarm::make_trial_config(sc, *kind, c.seed, overrides_of(c), c.time_limit, c.dt);
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

std::string opt_time(const std::optional<double>& t) {
  return t ? swarm::format_double(*t) : std::string("NA");
}

json header(const swarm::TrialConfig& cfg, const std::string& mode) {
  json j;
  j["tool"] = "swarmbench";
  j["version"] = swarm::kToolVersion;
  j["mode"] = mode;
  j["scenario"] = {{"name", cfg.scenario.name}, {"content_hash", hex(swarm::content_hash(cfg.scenario))}};
  j["controller"] = std::string(swarm::to_string(cfg.controller));
  j["time_limit"] = cfg.time_limit;
  j["dt"] = cfg.dt;
  json ov = json::object();
  for (const auto& [k, v] : cfg.overrides) ov[k] = v;
  j["overrides"] = ov;
  j["config_hash"] = hex(swarm::config_hash(cfg));
  return j;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string trial_table(const swarm::AggregateStats& s) {
  std::ostringstream t;
  t << "seed\treached\tarrival_time\tn_collisions\tdiagnostic\n";
  for (const auto& r : s.rows) {
    t << r.seed << '\t' << (r.reached ? 1 : 0) << '\t' << opt_time(r.arrival_time) << '\t'
      << r.n_collisions << '\t' << r.diagnostic << '\n';
  }
  return t.str();
}

json stats_json(const swarm::AggregateStats& s) {
  json j;
  j["n_trials"] = s.n_trials;
  j["n_success"] = s.n_success;
  j["reachability"] = s.reachability;
  j["mean_time"] = s.mean_time ? json(*s.mean_time) : json(nullptr);
  return j;
}

int cmd_run(const Common& c) {
  const swarm::TrialConfig cfg = config_of(c);
  const swarm::TrialResult res = swarm::run_trial(cfg);
  std::cout << "scenario\tcontroller\tseed\treached\tarrival_time\tsteps\tn_collisions\tconfig_hash\n"
            << cfg.scenario.name << '\t' << swarm::to_string(cfg.controller) << '\t' << cfg.seed
            << '\t' << (res.reached ? 1 : 0) << '\t' << opt_time(res.arrival_time) << '\t'
            << res.steps << '\t' << res.collision_points.size() << '\t' << hex(res.config_hash)
            << '\n';
  if (!res.diagnostic.empty()) std::cerr << "trial aborted: " << res.diagnostic << '\n';
  if (!c.out.empty()) swarm::export_trial(res, swarm::export_meta(cfg), c.out);
  return 0;
}

int cmd_batch(const Common& c, std::size_t trials, int threads) {
  const swarm::TrialConfig cfg = config_of(c);
  const swarm::AggregateStats s = swarm::run_batch(cfg, trials, c.seed, threads);
  std::cout << "scenario\tcontroller\tn_trials\tn_success\treachability\tmean_time\n"
            << cfg.scenario.name << '\t' << swarm::to_string(cfg.controller) << '\t' << s.n_trials
            << '\t' << s.n_success << '\t' << swarm::format_double(s.reachability) << '\t'
            << opt_time(s.mean_time) << '\n';
  if (!c.out.empty()) {
    ensure_dir(c.out);
    write_text(fs::path(c.out) / "trials.tsv", trial_table(s));
    json j = header(cfg, "batch");
    j["base_seed"] = c.seed;
    j["stats"] = stats_json(s);
    write_text(fs::path(c.out) / "summary.json", j.dump(2) + "\n");
  }
  return 0;
}

swarm::SweepAxis parse_axis(const std::string& text) {
  const auto [key, values] = swarm::split_override(text);
  swarm::SweepAxis axis{key, {}};
  std::istringstream in(values);
  std::string v;
  while (std::getline(in, v, ',')) {
    if (!v.empty()) axis.values.push_back(v);
  }
  if (axis.values.empty()) throw std::invalid_argument("sweep axis '" + key + "' has no values");
  return axis;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& grid_args, std::size_t trials,
              int threads) {
  const swarm::TrialConfig cfg = config_of(c);
  std::vector<swarm::SweepAxis> grid;
  for (const auto& g : grid_args) grid.push_back(parse_axis(g));
  const auto rows = swarm::sweep(cfg, grid, trials, c.seed, threads);

  std::ostringstream t;
  for (const auto& axis : grid) t << axis.key << '\t';
  t << "n_trials\tn_success\treachability\tmean_time\terror\n";
  json cells = json::array();
  for (const auto& r : rows) {
    for (const auto& kv : r.settings) t << kv.second << '\t';
    t << r.stats.n_trials << '\t' << r.stats.n_success << '\t'
      << swarm::format_double(r.stats.reachability) << '\t' << opt_time(r.stats.mean_time) << '\t'
      << r.error << '\n';
    json cell;
    json settings = json::object();
    for (const auto& [k, v] : r.settings) settings[k] = v;
    cell["settings"] = settings;
    cell["stats"] = stats_json(r.stats);
    cell["error"] = r.error;
    cells.push_back(cell);
  }
  std::cout << t.str();
  if (!c.out.empty()) {
    ensure_dir(c.out);
    write_text(fs::path(c.out) / "sweep.tsv", t.str());
    json j = header(cfg, "sweep");
    j["base_seed"] = c.seed;
    j["trials_per_cell"] = trials;
    j["cells"] = cells;
    write_text(fs::path(c.out) / "summary.json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_bench_time(const Common& c, const std::vector<std::size_t>& sizes, std::size_t points,
                   int reps) {
  swarm::SimParams params = swarm::default_params();
  params.set_dt(c.dt);
  params.ctrl.sph.neighbor_mode = swarm::NeighborMode::brute_force;
  for (const auto& [k, v] : overrides_of(c)) swarm::apply_override(params, k, v);
  params.validate();
  if (reps < 1) throw std::invalid_argument("--reps must be >= 1");

  std::vector<swarm::TimingRow> rows;
  std::ostringstream t;
  t << "n_robots\tmedian_ms\tmin_ms\n";
  for (const std::size_t n : sizes) {
    rows.push_back(swarm::time_controller(n, points, reps, params.ctrl.sph, c.seed));
    t << n << '\t' << swarm::format_double(rows.back().median_ms) << '\t'
      << swarm::format_double(rows.back().min_ms) << '\n';
  }
  std::cout << t.str();
  const double slope = rows.size() >= 2 ? swarm::loglog_slope(rows) : 0.0;
  if (rows.size() >= 2) std::cout << "loglog_slope\t" << swarm::format_double(slope) << '\n';
  if (!c.out.empty()) {
    ensure_dir(c.out);
    write_text(fs::path(c.out) / "timing.tsv", t.str());
    json j;
    j["tool"] = "swarmbench";
    j["version"] = swarm::kToolVersion;
    j["mode"] = "bench-time";
    j["neighbors"] = params.ctrl.sph.neighbor_mode == swarm::NeighborMode::grid ? "grid" : "brute";
    j["n_points"] = points;
    j["reps"] = reps;
    j["loglog_slope"] = slope;
    j["params_hash"] = hex(std::hash<std::string>{}(swarm::describe(params)));
    write_text(fs::path(c.out) / "summary.json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_validate(const Common& c) {
  const fs::path path = swarm::resolve_scenario_path(c.scenario);
  const swarm::Scenario sc = swarm::load_scenario(path);
  std::cout << "path\tname\tobstacles\tn_robots\tcontent_hash\n"
            << path.string() << '\t' << sc.name << '\t' << sc.obstacles.size() << '\t'
            << sc.n_robots << '\t' << hex(swarm::content_hash(sc)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm navigation benchmark harness"};
  app.set_version_flag("--version", std::string(swarm::kToolVersion));
  app.require_subcommand(1);

  Common run_c, batch_c, sweep_c, time_c, val_c;
  std::size_t batch_trials = 50, sweep_trials = 50;
  int batch_threads = 1, sweep_threads = 1;
  std::vector<std::string> grid;
  std::vector<std::size_t> sizes{25, 50, 100, 200};
  std::size_t points = 0;
  int reps = 21;

  auto* run = app.add_subcommand("run", "Run one trial");
  add_common(run, run_c);

  auto* batch = app.add_subcommand("batch", "Run seeded trials and aggregate");
  add_common(batch, batch_c);
  batch->add_option("--trials", batch_trials, "Number of trials")->capture_default_str();
  batch->add_option("--threads", batch_threads, "Worker threads (<=0: OpenMP default)")
      ->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "Full-factorial parameter sweep");
  add_common(sw, sweep_c);
  sw->add_option("--trials", sweep_trials, "Trials per cell")->capture_default_str();
  sw->add_option("--grid", grid, "Axis key=v1,v2,... (repeatable)")->required();
  sw->add_option("--threads", sweep_threads, "Worker threads")->capture_default_str();

  auto* bt = app.add_subcommand("bench-time", "Single-thread controller timing");
  add_common(bt, time_c, false);
  bt->add_option("--n", sizes, "Swarm sizes")->capture_default_str();
  bt->add_option("--points", points, "Collision points in the map")->capture_default_str();
  bt->add_option("--reps", reps, "Repetitions per size")->capture_default_str();

  auto* val = app.add_subcommand("validate-scenario", "Parse and validate a scenario");
  val->add_option("--scenario", val_c.scenario, "Scenario name or path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_c);
    if (*batch) return cmd_batch(batch_c, batch_trials, batch_threads);
    if (*sw) return cmd_sweep(sweep_c, grid, sweep_trials, sweep_threads);
    if (*bt) return cmd_bench_time(time_c, sizes, points, reps);
    if (*val) return cmd_validate(val_c);
  } catch (const swarm::ScenarioParseError& e) {
    std::cerr << "scenario parse error: " << e.what() << '\n';
    return 3;
  } catch (const swarm::ScenarioValidationError& e) {
    std::cerr << "scenario validation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
