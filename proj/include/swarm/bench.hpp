#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swarm/baselines.hpp"
#include "swarm/params.hpp"
#include "swarm/world.hpp"

namespace swarm {

inline constexpr const char* kToolVersion = "1.0.0";

struct TrialConfig {
  Scenario scenario;
  ControllerKind controller = ControllerKind::ours;
  std::uint64_t seed = 0;
  double time_limit = 100.0;  // [s]
  double dt = 0.1;            // [s]
  SimParams params = default_params();
  std::vector<std::pair<std::string, std::string>> overrides;  // already applied to params
  bool record_trajectory = true;

  void validate() const;
};

// Builds a config from defaults plus key=value overrides (applied in order).
TrialConfig make_trial_config(const Scenario& sc, ControllerKind kind, std::uint64_t seed,
                              const std::vector<std::pair<std::string, std::string>>& overrides,
                              double time_limit = 100.0, double dt = 0.1);

// Stable 64-bit hash of everything that determines a trial's outcome.
std::uint64_t config_hash(const TrialConfig& cfg);

struct TrajectoryRow {
  long step = 0;
  std::size_t robot = 0;
  double x = 0.0;  // effective center [m]
  double y = 0.0;
  double theta = 0.0;
  double v_cmd = 0.0;  // |commanded velocity| [m/s]
  double v_obs = 0.0;  // |observed velocity| [m/s]
  double integral = 0.0;
  bool fired = false;

  friend bool operator==(const TrajectoryRow&, const TrajectoryRow&) = default;
};

struct TrialResult {
  bool reached = false;
  std::optional<double> arrival_time;
  long steps = 0;
  std::vector<TrajectoryRow> trajectory;  // also the per-robot detector trace
  std::vector<CollisionPoint> collision_points;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string diagnostic;  // non-empty when the trial was aborted
};

TrialResult run_trial(const TrialConfig& cfg);

struct TrialRow {
  std::uint64_t seed = 0;
  bool reached = false;
  std::optional<double> arrival_time;
  std::size_t n_collisions = 0;
  std::string diagnostic;
};

struct AggregateStats {
  std::size_t n_trials = 0;
  std::size_t n_success = 0;
  double reachability = 0.0;
  std::optional<double> mean_time;  // over successful trials only
  std::vector<TrialRow> rows;       // sorted by seed
};

// Order-insensitive: rows are sorted by seed before summation.
AggregateStats aggregate(std::vector<TrialRow> rows);

// Seeds base_seed .. base_seed + n - 1; `threads` <= 0 uses the OpenMP default.
AggregateStats run_batch(const TrialConfig& tmpl, std::size_t n, std::uint64_t base_seed,
                         int threads = 1);
AggregateStats run_seeds(const TrialConfig& tmpl, const std::vector<std::uint64_t>& seeds,
                         int threads = 1);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct SweepRow {
  std::vector<std::pair<std::string, std::string>> settings;
  AggregateStats stats;
  std::string error;  // set when the cell's configuration was rejected
};

// Full-factorial grid; the last axis varies fastest.
std::vector<SweepRow> sweep(const TrialConfig& tmpl, const std::vector<SweepAxis>& grid,
                            std::size_t trials, std::uint64_t base_seed, int threads = 1);

struct TimingRow {
  std::size_t n_robots = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
};

// Wall time of one controller_step (neighbor build + all force terms) on a
// random configuration, single-threaded.
TimingRow time_controller(std::size_t n_robots, std::size_t n_points, int reps,
                          const SphParams& p, std::uint64_t seed = 1);

// Least-squares slope of log(ms) against log(N).
double loglog_slope(const std::vector<TimingRow>& rows);

struct ExportMeta {
  std::string scenario_name;
  std::uint64_t scenario_hash = 0;
  std::string controller;
  double time_limit = 0.0;
  double dt = 0.0;
  std::vector<std::pair<std::string, std::string>> overrides;
};

ExportMeta export_meta(const TrialConfig& cfg);

// Writes trajectory.csv, collisions.csv and summary.json into `dir`.
// Throws std::runtime_error naming the path on I/O failure.
void export_trial(const TrialResult& res, const ExportMeta& meta, const std::filesystem::path& dir);

std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& file);
std::vector<CollisionPoint> read_collisions(const std::filesystem::path& file);

// Locates a bundled scenario by name, or loads `name_or_path` if it is a file.
std::filesystem::path resolve_scenario_path(const std::string& name_or_path);

}  // namespace swarm
