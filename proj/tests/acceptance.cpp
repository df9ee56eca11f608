// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Thresholds are fixed here on purpose; there are no flags to relax them.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gen.hpp"
#include "swarm/baselines.hpp"
#include "swarm/bench.hpp"
#include "swarm/obstacle.hpp"
#include "swarm/sph.hpp"
#include "swarm/vehicle.hpp"
#include "swarm/world.hpp"

using namespace swarm;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kTrials = 50;
constexpr std::uint64_t kBaseSeed = 0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string pct(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", 100.0 * r);
  return buf;
}

std::string num(double v, const char* fmt = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Table of reachability / mean time, computed once and shared by criteria 1-4.
class Table {
 public:
  const AggregateStats& get(const std::string& scenario, ControllerKind kind) {
    const auto key = std::make_pair(scenario, kind);
    auto it = cells_.find(key);
    if (it == cells_.end()) {
      TrialConfig cfg = make_trial_config(load_scenario(resolve_scenario_path(scenario)), kind, 0, {});
      cfg.record_trajectory = false;
      it = cells_.emplace(key, run_batch(cfg, kTrials, kBaseSeed, 0)).first;
      std::fprintf(stderr, "  %-13s %-5s %s\n", scenario.c_str(), std::string(to_string(kind)).c_str(),
                   pct(it->second.reachability).c_str());
    }
    return it->second;
  }
  double reach(const std::string& s, ControllerKind k) { return get(s, k).reachability; }

 private:
  std::map<std::pair<std::string, ControllerKind>, AggregateStats> cells_;
};

Verdict reachability_floor(Table& t) {
  const std::pair<const char*, double> floors[] = {
      {"entry", 0.96}, {"dense_pillar", 0.90}, {"barricade", 0.90}, {"pocket_maze", 0.80}};
  Verdict v{true, ""};
  for (const auto& [s, lo] : floors) {
    const double r = t.reach(s, ControllerKind::ours);
    v.pass = v.pass && r >= lo;
    v.detail += std::string(s) + " " + pct(r) + " (>= " + pct(lo) + ") ";
  }
  return v;
}

Verdict baseline_zeros(Table& t) {
  const std::pair<const char*, ControllerKind> cells[] = {
      {"barricade", ControllerKind::sph_only}, {"barricade", ControllerKind::rvo_lite},
      {"pocket_maze", ControllerKind::sph_only}, {"pocket_maze", ControllerKind::rvo_lite},
      {"pocket_maze", ControllerKind::bound}};
  Verdict v{true, ""};
  for (const auto& [s, k] : cells) {
    const double r = t.reach(s, k);
    v.pass = v.pass && r == 0.0;
    v.detail += std::string(s) + "/" + std::string(to_string(k)) + " " + pct(r) + " ";
  }
  v.detail += "(all must be 0%)";
  return v;
}

Verdict baseline_bands(Table& t) {
  struct Band {
    const char* s;
    ControllerKind k;
    double lo, hi;
  };
  const Band bands[] = {{"entry", ControllerKind::sph_only, 0.55, 0.95},
                        {"entry", ControllerKind::rvo_lite, 0.55, 0.95},
                        {"dense_pillar", ControllerKind::bound, 0.50, 0.90},
                        {"entry", ControllerKind::bound, 0.95, 1.00}};
  Verdict v{true, ""};
  for (const auto& b : bands) {
    const double r = t.reach(b.s, b.k);
    v.pass = v.pass && r >= b.lo && r <= b.hi;
    v.detail += std::string(b.s) + "/" + std::string(to_string(b.k)) + " " + pct(r) + " in [" +
                pct(b.lo) + "," + pct(b.hi) + "] ";
  }
  return v;
}

Verdict time_ordering(Table& t) {
  const auto& ours = t.get("entry", ControllerKind::ours);
  const auto& bound = t.get("entry", ControllerKind::bound);
  if (!ours.mean_time || !bound.mean_time) return {false, "a mean time is undefined (no successes)"};
  const double ratio = *ours.mean_time / *bound.mean_time;
  return {ratio < 0.5, "entry mean time ours " + num(*ours.mean_time, "%.2f") + " s, bound " +
                           num(*bound.mean_time, "%.2f") + " s, ratio " + num(ratio, "%.3f") +
                           " (< 0.5)"};
}

Verdict timing() {
  SphParams p = default_params().ctrl.sph;
  p.neighbor_mode = NeighborMode::brute_force;
  p.k_obs = 0.0;
  std::vector<TimingRow> rows;
  for (const std::size_t n : {25u, 50u, 100u, 200u}) rows.push_back(time_controller(n, 0, 21, p, 1));
  const double slope = loglog_slope(rows);
  const double at100 = rows[2].median_ms;
  std::string detail = "median at N=100 " + num(at100, "%.3f") + " ms (<= 50), slope " +
                       num(slope, "%.3f") + " (in [1.7, 2.2]); medians";
  for (const auto& r : rows) detail += " " + std::to_string(r.n_robots) + ":" + num(r.median_ms, "%.3f");
  return {at100 <= 50.0 && slope >= 1.7 && slope <= 2.2, detail};
}

SphParams generic_params() {
  SphParams p = gen::busy_params();
  p.kappa = 2.0;
  return p;
}

Verdict kernel_suite() {
  gen::Rng rng(1001);
  SphParams p = generic_params();
  long support_bad = 0, grad_bad = 0;
  // Compact support must be exact, including just past the edge.
  for (int k = 0; k < 10000; ++k) {
    const double r = p.support() * (1.0 + rng.uniform(0.0, 1.0) * (k % 2 ? 1e-12 : 3.0));
    if (r <= p.support()) continue;
    const Vec2 dq{r * std::cos(k * 0.1), r * std::sin(k * 0.1)};
    if (kernel_weight(r, p) != 0.0 || kernel_gradient(dq, p) != Vec2{}) ++support_bad;
  }
  const double eps = 1e-7 * p.h;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Vec2 dq = rng.in_disk(p.support() - 4.0 * eps);
    const Vec2 g = kernel_gradient(dq, p);
    const double fx = (kernel_weight(norm(dq + Vec2{eps, 0}), p) -
                       kernel_weight(norm(dq - Vec2{eps, 0}), p)) / (2.0 * eps);
    const double fy = (kernel_weight(norm(dq + Vec2{0, eps}), p) -
                       kernel_weight(norm(dq - Vec2{0, eps}), p)) / (2.0 * eps);
    const double scale = std::max(norm(g), 1e-3 * kernel_weight(0.0, p) / p.h);
    const double rel = norm(g - Vec2{fx, fy}) / scale;
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++grad_bad;
  }
  return {support_bad == 0 && grad_bad == 0,
          "support violations " + std::to_string(support_bad) + ", gradient mismatches " +
              std::to_string(grad_bad) + "/10000, worst rel " + num(worst, "%.2e") + " (<= 1e-6)"};
}

Verdict momentum_suite() {
  gen::Rng rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SphParams p = generic_params();
    SwarmSnapshot s = gen::swarm(rng, static_cast<std::size_t>(rng.integer(2, 40)), 0.5, 0.2);
    const NeighborIndex idx = build_neighbor_index(s, {}, p);
    compute_caches(s, idx, p);
    Vec2 total;
    double mag = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vec2 f = sph_force(i, s, idx, p) + inter_robot_repulsion(i, s, idx, p);
      total += f;
      mag += norm(f);
    }
    if (mag > 0.0) worst = std::max(worst, norm(total) / mag);
  }
  return {worst <= 1e-9, "worst |sum f| / sum |f| over 100 swarms " + num(worst, "%.2e") + " (<= 1e-9)"};
}

DetectorParams detector(double zeta, double i_thr) {
  DetectorParams dp;
  dp.zeta = zeta;
  dp.i_thr = i_thr;
  return dp;
}

Verdict detector_suite() {
  gen::Rng rng(1003);
  long fired_perfect = 0, negative = 0, wrong_count = 0, checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const DetectorParams dp = detector(rng.uniform(0.01, 0.95), rng.uniform(0.05, 6.0));
    double integral = 0.0, noisy = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Vec2 cmd = rng.in_disk(0.2);
      const auto u = update_detector(integral, cmd, cmd, dp);
      if (u.detected) ++fired_perfect;
      integral = u.integral;
      const auto w = update_detector(noisy, cmd, rng.in_disk(0.3), dp);
      if (w.integral < 0.0 || u.integral < 0.0) ++negative;
      noisy = w.integral;
    }
    const double ratio = dp.i_thr / (1.0 - dp.zeta);
    if (std::abs(ratio - std::round(ratio)) < 1e-9) continue;
    ++checked;
    double i = 0.0;
    int steps = 0;
    for (;;) {
      ++steps;
      const auto u = update_detector(i, {dp.v_max, 0.0}, {}, dp);
      i = u.integral;
      if (u.detected || steps > 100000) break;
    }
    if (steps != static_cast<int>(std::ceil(ratio))) ++wrong_count;
  }
  return {fired_perfect == 0 && negative == 0 && wrong_count == 0,
          "perfect-tracking firings " + std::to_string(fired_perfect) + ", negative integrals " +
              std::to_string(negative) + ", wrong firing step " + std::to_string(wrong_count) + "/" +
              std::to_string(checked)};
}

Verdict degeneracy_suite() {
  gen::Rng rng(1004);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SphParams p = generic_params();
    p.k_obs = 0.0;
    const auto snap = gen::swarm(rng, static_cast<std::size_t>(rng.integer(1, 30)), 0.6, 0.2);
    const Vec2 goal = rng.point(0.9);
    CollisionMap map;
    const auto a = controller_step(snap, map, goal, p, detector(0.3, 1.0), trial);
    const auto b = sph_only_step(snap, goal, p);
    if (a.v_cmd != b.v_cmd) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + "/100 states differ bitwise"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism_suite() {
  const fs::path root = fs::temp_directory_path() / "swarm_acceptance_determinism";
  int configs = 0, differ = 0;
  for (const Scenario& sc : gen::bundled_scenarios()) {
    for (const ControllerKind k : kAllControllers) {
      const TrialConfig cfg = make_trial_config(sc, k, 11, {});
      for (const char* run : {"a", "b"}) {
        fs::remove_all(root / run);
        export_trial(run_trial(cfg), export_meta(cfg), root / run);
      }
      ++configs;
      for (const char* f : {"trajectory.csv", "collisions.csv", "summary.json"}) {
        if (slurp(root / "a" / f) != slurp(root / "b" / f)) {
          ++differ;
          break;
        }
      }
    }
  }
  fs::remove_all(root);
  return {differ == 0, std::to_string(differ) + "/" + std::to_string(configs) +
                           " configs gave different exports"};
}

Verdict world_suite() {
  gen::Rng rng(1005);
  const VehicleParams vp = default_params().vehicle(load_scenario(resolve_scenario_path("open")));
  double worst_pen = 0.0;
  long sequences = 0;
  const auto scenarios = gen::bundled_scenarios();
  for (const Scenario& sc : scenarios) {
    for (int seq = 0; seq < 1000; ++seq, ++sequences) {
      WorldState w;
      w.poses = spawn_swarm(sc, static_cast<std::uint64_t>(seq), vp);
      // Bias toward the goal so robots actually reach the obstacles.
      const Vec2 drift = (sc.goal - sc.start_min) * 0.2;
      for (int k = 0; k < 100; ++k) {
        std::vector<UnicycleCmd> cmds;
        for (const auto& p : w.poses) {
          cmds.push_back(to_unicycle(clamp_norm(rng.in_disk(0.2) + drift, 0.2), p.theta, vp));
        }
        w = world_step(w, cmds, sc, vp, 0.1);
        worst_pen = std::max(worst_pen, max_penetration(effective_centers(w, vp), sc, vp.radius()));
      }
    }
  }

  // Stall: a robot facing a wall, pushed straight into it.
  const Scenario walled = parse_scenario(
      "version 1\nname stall\nbounds 0.9 0.9\nstart_region 0.05 0.05 0.2\ngoal 0.8 0.8\n"
      "n_robots 1\nrobot_radius 0.0325\nobstacle wall\n  0.5 0.3\n  0.55 0.3\n  0.55 0.7\n"
      "  0.5 0.7\nend\n");
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 cmd{rng.uniform(0.05, 0.2), 0.0};
    const double gap = rng.uniform(0.0, cmd.x * 0.1);
    WorldState w;
    w.poses = {pose_from_center({0.5 - vp.radius() - gap, rng.uniform(0.35, 0.65)},
                                rng.uniform(-0.05, 0.05), vp)};
    Vec2 v_obs;
    for (int k = 0; k < 2; ++k) {
      const Vec2 before = effective_center(w.poses[0], vp);
      w = world_step(w, std::vector<UnicycleCmd>{to_unicycle(cmd, w.poses[0].theta, vp)}, walled, vp,
                     0.1);
      v_obs = observe_velocity(effective_center(w.poses[0], vp), before, 0.1);
    }
    worst_ratio = std::max(worst_ratio, norm(v_obs) / norm(cmd));
  }
  return {worst_pen <= kPenetrationTolerance && worst_ratio < 0.05,
          "max penetration " + num(worst_pen, "%.6e") + " m over " + std::to_string(sequences) +
              " sequences on " + std::to_string(scenarios.size()) +
              " scenarios (<= 1e-6), worst stall |v_obs|/|v_cmd| after 2 steps " +
              num(worst_ratio, "%.2e") + " (< 0.05)"};
}

Verdict kinematics_suite() {
  gen::Rng rng(1006);
  const VehicleParams vp(0.0125, 0.02, 10.0, 1000.0);
  const double dt = 1e-4;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Pose p{rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(-3.14159, 3.14159)};
    const Vec2 v = rng.in_disk(0.2);
    if (norm(v) < 1e-3) continue;
    const Pose q = step_unicycle(p, to_unicycle(v, p.theta, vp), dt);
    const Vec2 moved = (effective_center(q, vp) - effective_center(p, vp)) / dt;
    worst = std::max(worst, norm(moved - v) / norm(v));
  }
  return {worst <= 1e-3, "worst relative velocity error " + num(worst, "%.2e") + " (<= 1e-3)"};
}

}  // namespace

int main() {
  Table table;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"ours reachability", [&] { return reachability_floor(table); }},
      {"baseline zero cells", [&] { return baseline_zeros(table); }},
      {"baseline partial bands", [&] { return baseline_bands(table); }},
      {"entry mean-time ordering", [&] { return time_ordering(table); }},
      {"controller timing", timing},
      {"kernel and gradient", kernel_suite},
      {"momentum", momentum_suite},
      {"detector", detector_suite},
      {"degeneracy", degeneracy_suite},
      {"determinism", determinism_suite},
      {"world", world_suite},
      {"kinematics", kinematics_suite},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %2zu %s  %-26s %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
