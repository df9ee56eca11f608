#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gen.hpp"
#include "swarm/baselines.hpp"
#include "swarm/bench.hpp"

using namespace swarm;
using doctest::Approx;

namespace {

RobotState robot_at(Vec2 q, Vec2 v = {}) {
  RobotState s;
  s.q = q;
  s.v_cmd = v;
  s.v_obs = v;
  return s;
}

SwarmSnapshot snapshot(std::initializer_list<RobotState> states) {
  SwarmSnapshot s;
  s.states = states;
  return s;
}

// Two holonomic robots swapping sides; returns the closest approach.
double encounter(gen::Rng& rng, const RvoParams& rp) {
  const Vec2 center{rng.uniform(0.3, 0.6), rng.uniform(0.3, 0.6)};
  const double a = rng.uniform(-3.2, 3.2);
  const double r = rng.uniform(0.1, 0.3);
  const Vec2 dir{std::cos(a), std::sin(a)};
  const Vec2 jitter = rng.in_disk(0.05);
  Vec2 q[2] = {center - dir * r, center + dir * r + jitter};
  const Vec2 goal[2] = {center + dir * r + rng.in_disk(0.05), center - dir * r};
  Vec2 v[2] = {rng.in_disk(rp.v_max), rng.in_disk(rp.v_max)};
  double closest = norm(q[1] - q[0]);
  for (int k = 0; k < 80; ++k) {
    Vec2 next[2];
    for (int i = 0; i < 2; ++i) {
      const SwarmSnapshot s = snapshot({robot_at(q[i], v[i]), robot_at(q[1 - i], v[1 - i])});
      next[i] = rvo_lite_step(s, goal[i], rp).v_cmd[0];
    }
    for (int i = 0; i < 2; ++i) {
      v[i] = next[i];
      q[i] += v[i] * rp.dt;
    }
    closest = std::min(closest, norm(q[1] - q[0]));
  }
  return closest;
}

}  // namespace

TEST_CASE("controller kinds round-trip through their names") {
  for (const ControllerKind k : kAllControllers) {
    CHECK(parse_controller_kind(to_string(k)) == k);
  }
  CHECK(parse_controller_kind("sph_only") == ControllerKind::sph_only);
  CHECK(parse_controller_kind("rvo_lite") == ControllerKind::rvo_lite);
  CHECK_FALSE(parse_controller_kind("orca").has_value());
}

TEST_CASE("bound pursues the goal when nothing was hit") {
  BoundParams bp;
  bp.k_pursuit = 1.0;
  DetectorParams dp;
  std::vector<BoundState> st(2);
  const auto snap = snapshot({robot_at({0.1, 0.1}), robot_at({0.69, 0.45})});
  const ControllerOutput out = bound_step(snap, st, {0.7, 0.45}, bp, dp);
  const Vec2 far = out.v_cmd[0];
  CHECK(norm(far) == Approx(0.2).epsilon(1e-12));
  CHECK(std::abs(cross(far, Vec2{0.6, 0.35})) < 1e-15);
  CHECK(out.v_cmd[1].x == Approx(0.01).epsilon(1e-9));
  CHECK(out.v_cmd[1].y == 0.0);
  CHECK(out.new_collisions.empty());
}

TEST_CASE("bound backs away from its collision point, then resumes") {
  BoundParams bp;
  bp.bounce_steps = 3;
  DetectorParams dp;
  std::vector<BoundState> st(1);
  RobotState s = robot_at({0.4, 0.45});
  s.v_cmd = {0.2, 0.0};
  s.v_obs = {};
  s.integral = dp.i_thr;
  ControllerOutput out = bound_step(snapshot({s}), st, {0.7, 0.45}, bp, dp);
  REQUIRE(out.detected[0]);
  REQUIRE(out.new_collisions.size() == 1);
  // Still on the point itself: retreat against the command that hit it.
  CHECK(out.v_cmd[0].x == Approx(-0.2).epsilon(1e-12));
  CHECK(out.v_cmd[0].y == 0.0);
  CHECK(st[0].timer == 2);

  s.q = {0.39, 0.46};
  s.v_cmd = out.v_cmd[0];
  s.v_obs = s.v_cmd;
  s.integral = out.detector_integrals[0];
  out = bound_step(snapshot({s}), st, {0.7, 0.45}, bp, dp);
  const Vec2 away = Vec2{-0.01, 0.01} / std::sqrt(2e-4);
  CHECK(out.v_cmd[0].x == Approx(away.x * 0.2).epsilon(1e-9));
  CHECK(out.v_cmd[0].y == Approx(away.y * 0.2).epsilon(1e-9));
  for (int k = 0; k < 2; ++k) out = bound_step(snapshot({s}), st, {0.7, 0.45}, bp, dp);
  CHECK(st[0].timer == 0);
  CHECK(out.v_cmd[0].x > 0.0);
}

TEST_CASE("bound robots ignore one another") {
  gen::Rng rng(107);
  BoundParams bp;
  DetectorParams dp;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(1, 12));
    SwarmSnapshot snap = gen::swarm(rng, n, 0.9, 0.2);
    for (auto& s : snap.states) s.integral = rng.uniform(0.0, 1.5);
    std::vector<BoundState> st(n);
    for (auto& b : st) {
      if (rng.coin()) b.last_point = rng.point(0.9);
      b.timer = rng.integer(0, 10);
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    SwarmSnapshot snap_p;
    std::vector<BoundState> st_p;
    for (const std::size_t k : perm) {
      snap_p.states.push_back(snap.states[k]);
      st_p.push_back(st[k]);
    }
    const Vec2 goal = rng.point(0.9);
    const ControllerOutput a = bound_step(snap, st, goal, bp, dp);
    const ControllerOutput b = bound_step(snap_p, st_p, goal, bp, dp);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = perm[i];
      const bool coincident_fallback = st[k].timer > 0 && st[k].last_point &&
                                       norm(snap.states[k].q - *st[k].last_point) < 1e-12;
      if (!coincident_fallback) CHECK(b.v_cmd[i] == a.v_cmd[k]);
      CHECK(b.detected[i] == a.detected[k]);
      CHECK(st_p[i].timer == st[k].timer);
      CHECK(st[k].timer >= 0);
    }
  }
}

TEST_CASE("solve_velocity") {
  SUBCASE("no constraints clamps the preference") {
    const Vec2 v = solve_velocity({}, 0.2, {0.3, 0.4});
    CHECK(v.x == Approx(0.12).epsilon(1e-12));
    CHECK(v.y == Approx(0.16).epsilon(1e-12));
  }
  SUBCASE("one plane projects onto its boundary") {
    // {v : v.x <= 0.05}
    const std::vector<HalfPlane> planes{{{0.05, 0.0}, {0.0, 1.0}}};
    const Vec2 v = solve_velocity(planes, 0.3, {0.2, 0.1});
    CHECK(v.x == Approx(0.05).epsilon(1e-12));
    CHECK(v.y == Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("infeasible planes split the violation") {
    // {v.x <= -0.1} and {v.x >= 0.1}
    const std::vector<HalfPlane> planes{{{-0.1, 0.0}, {0.0, 1.0}}, {{0.1, 0.0}, {0.0, -1.0}}};
    const Vec2 v = solve_velocity(planes, 0.3, {0.2, 0.0});
    CHECK(std::abs(v.x) < 1e-9);
    CHECK(norm(v) <= 0.3 + 1e-12);
    CHECK(solve_velocity(planes, 0.3, {0.2, 0.0}) == v);
  }
  SUBCASE("random feasible sets are respected") {
    gen::Rng rng(109);
    for (int k = 0; k < 2000; ++k) {
      std::vector<HalfPlane> planes;
      const int m = rng.integer(1, 6);
      for (int j = 0; j < m; ++j) {
        // Every plane keeps the origin strictly inside.
        const double a = rng.uniform(-3.2, 3.2);
        const Vec2 nrm{std::cos(a), std::sin(a)};
        planes.push_back({nrm * rng.uniform(0.01, 0.2), {-nrm.y, nrm.x}});
      }
      const Vec2 v = solve_velocity(planes, 0.2, rng.in_disk(0.4));
      CHECK(norm(v) <= 0.2 + 1e-12);
      for (const auto& hp : planes) CHECK(cross(hp.direction, hp.point - v) <= 1e-12);
    }
  }
}

TEST_CASE("rvo leaves a lone robot on its preferred velocity") {
  RvoParams rp;
  const auto snap = snapshot({robot_at({0.2, 0.2}, {0.0, 0.1})});
  const Vec2 v = rvo_lite_step(snap, {0.25, 0.2}, rp).v_cmd[0];
  CHECK(v.x == Approx(0.05).epsilon(1e-12));
  CHECK(v.y == 0.0);
}

TEST_CASE("rvo deflects a symmetric head-on pair into mirrored paths") {
  RvoParams rp;
  const auto snap = snapshot({robot_at({0.3, 0.45}, {0.2, 0.0}), robot_at({0.6, 0.45}, {-0.2, 0.0})});
  const Vec2 a = rvo_lite_step(snap, {0.7, 0.45}, rp).v_cmd[0];
  const auto mirrored =
      snapshot({robot_at({0.6, 0.45}, {-0.2, 0.0}), robot_at({0.3, 0.45}, {0.2, 0.0})});
  const Vec2 b = rvo_lite_step(mirrored, {0.2, 0.45}, rp).v_cmd[0];
  CHECK(a.x == Approx(-b.x).epsilon(1e-12));
  CHECK(a.y == Approx(-b.y).epsilon(1e-12).scale(1e-3));
  CHECK(std::abs(a.y) > 1e-3);

  // Roll the pair forward: they pass without touching.
  Vec2 q[2] = {{0.3, 0.45}, {0.6, 0.45}};
  Vec2 v[2] = {{0.2, 0.0}, {-0.2, 0.0}};
  const Vec2 goals[2] = {{0.7, 0.45}, {0.2, 0.45}};
  double closest = 1.0;
  for (int k = 0; k < 40; ++k) {
    Vec2 next[2];
    for (int i = 0; i < 2; ++i) {
      next[i] = rvo_lite_step(snapshot({robot_at(q[i], v[i]), robot_at(q[1 - i], v[1 - i])}),
                              goals[i], rp)
                    .v_cmd[0];
    }
    for (int i = 0; i < 2; ++i) {
      v[i] = next[i];
      q[i] += v[i] * rp.dt;
    }
    closest = std::min(closest, norm(q[1] - q[0]));
    CHECK(q[0].y + q[1].y == Approx(0.9).epsilon(1e-9));
  }
  CHECK(closest >= 2.0 * rp.radius);
}

TEST_CASE("rvo pairs never touch on an open field") {
  gen::Rng rng(113);
  RvoParams rp;
  int touching = 0;
  for (int k = 0; k < 10000; ++k) {
    if (encounter(rng, rp) < 2.0 * rp.radius) ++touching;
  }
  CHECK(touching == 0);
}

TEST_CASE("every controller respects the speed cap") {
  gen::Rng rng(127);
  ControllerConfig cfg;
  const SimParams sp = default_params();
  cfg = sp.ctrl;
  for (const ControllerKind kind : kAllControllers) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = static_cast<std::size_t>(rng.integer(1, 10));
      auto ctrl = make_controller(kind, cfg, n);
      SwarmSnapshot snap = gen::swarm(rng, n, 0.9, 0.2);
      for (long step = 0; step < 10; ++step) {
        const ControllerOutput out = ctrl->step(snap, {0.7, 0.45}, step);
        REQUIRE(out.v_cmd.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(norm(out.v_cmd[i]) <= 0.2 + 1e-12);
          snap.states[i].v_cmd = out.v_cmd[i];
          snap.states[i].v_obs = out.v_cmd[i] * rng.uniform(0.0, 1.0);
          snap.states[i].integral = out.detector_integrals[i];
          snap.states[i].q += out.v_cmd[i] * 0.1;
        }
      }
      if (kind == ControllerKind::sph_only || kind == ControllerKind::rvo_lite) {
        CHECK(ctrl->collisions().size() == 0);
      }
    }
  }
}

TEST_CASE("sph_only reaches the goal on the open field") {
  const Scenario sc = load_scenario(resolve_scenario_path("open"));
  TrialConfig cfg = make_trial_config(sc, ControllerKind::sph_only, 0, {});
  cfg.record_trajectory = false;
  const TrialResult res = run_trial(cfg);
  CHECK(res.reached);
  CHECK(res.collision_points.empty());
}
