#include "swarm/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarm {

void DetectorParams::validate() const {
  if (!(v_max > 0.0)) throw std::invalid_argument("DetectorParams: v_max must be > 0");
  if (!(zeta >= 0.0 && zeta < 1.0)) {
    throw std::invalid_argument("DetectorParams: zeta must be in [0, 1)");
  }
  if (!(i_thr > 0.0)) throw std::invalid_argument("DetectorParams: i_thr must be > 0");
  if (!(dedup_radius >= 0.0)) {
    throw std::invalid_argument("DetectorParams: dedup_radius must be >= 0");
  }
}

std::vector<Vec2> CollisionMap::positions() const {
  std::vector<Vec2> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.c);
  return out;
}

bool CollisionMap::insert(const CollisionPoint& point, double dedup_radius) {
  const double r2 = dedup_radius * dedup_radius;
  for (const auto& existing : points_) {
    if (norm2(existing.c - point.c) < r2) return false;
  }
  points_.push_back(point);
  return true;
}

Vec2 observe_velocity(const Vec2& q_now, const Vec2& q_prev, double dt) {
  return (q_now - q_prev) / dt;
}

DetectorUpdate update_detector(double integral, const Vec2& v_cmd, const Vec2& v_obs,
                               const DetectorParams& dp) {
  const double err = dp.metric == TrackingError::speed ? std::abs(norm(v_cmd) - norm(v_obs))
                                                       : norm(v_cmd - v_obs);
  const double next = std::max(0.0, integral + err / dp.v_max - dp.zeta);
  if (next >= dp.i_thr) return {0.0, true};
  return {next, false};
}

bool register_collision(CollisionMap& map, const Vec2& q, long step, std::size_t robot,
                        const DetectorParams& dp) {
  return map.insert({q, step, robot}, dp.dedup_radius);
}

Vec2 obstacle_guard_direction(std::size_t robot, const Vec2& v_cmd) {
  const double s = norm(v_cmd);
  return s > kCoincidentDistance ? v_cmd * (-1.0 / s) : coincident_direction(robot);
}

Vec2 obstacle_repulsion(const Vec2& q, const Vec2& guard, std::span<const Vec2> points,
                        const NeighborIndex& idx, const SphParams& p) {
  if (p.k_obs == 0.0 || points.empty()) return {};
  thread_local std::vector<std::size_t> nbrs;
  idx.points_near(q, nbrs);
  Vec2 f;
  for (const std::size_t k : nbrs) f += repulsion_term(q - points[k], guard, p);
  return f * p.k_obs;
}

std::vector<Vec2> sph_commands(const SwarmSnapshot& snap, std::span<const Vec2> points,
                               const Vec2& goal, const SphParams& p) {
  SwarmSnapshot work;
  work.states = snap.states;
  const bool with_obstacles = p.k_obs != 0.0 && !points.empty();
  const NeighborIndex idx =
      build_neighbor_index(work, with_obstacles ? points : std::span<const Vec2>{}, p);
  compute_caches(work, idx, p);
  std::vector<Vec2> force = swarm_forces(work, idx, goal, p);

  const long n = static_cast<long>(work.size());
  std::vector<Vec2> out(work.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Vec2 f = force[k];
    if (with_obstacles) f += obstacle_repulsion(
        work.states[k].q, obstacle_guard_direction(k, work.states[k].v_cmd), points, idx, p);
    out[k] = integrate_velocity(work.states[k].v_cmd, f, p);
  }
  return out;
}

ControllerOutput controller_step(const SwarmSnapshot& snap, CollisionMap& map, const Vec2& goal,
                                 const SphParams& p, const DetectorParams& dp, long step) {
  const std::size_t n = snap.size();
  ControllerOutput out;
  out.detector_integrals.resize(n);
  out.detected.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const RobotState& s = snap.states[i];
    const DetectorUpdate u = update_detector(s.integral, s.v_cmd, s.v_obs, dp);
    out.detector_integrals[i] = u.integral;
    out.detected[i] = u.detected;
  }
  // Serialized section: registration order is robot-id order.
  for (std::size_t i = 0; i < n; ++i) {
    if (out.detected[i] && register_collision(map, snap.states[i].q, step, i, dp)) {
      out.new_collisions.push_back(snap.states[i].q);
    }
  }
  const auto points = map.positions();
  out.v_cmd = sph_commands(snap, points, goal, p);
  return out;
}

}  // namespace swarm
