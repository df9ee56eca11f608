#include "swarm/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace swarm {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::ours: return "ours";
    case ControllerKind::sph_only: return "sph";
    case ControllerKind::bound: return "bound";
    case ControllerKind::rvo_lite: return "rvo";
  }
  return "?";
}

std::optional<ControllerKind> parse_controller_kind(std::string_view text) {
  if (text == "ours") return ControllerKind::ours;
  if (text == "sph" || text == "sph_only") return ControllerKind::sph_only;
  if (text == "bound") return ControllerKind::bound;
  if (text == "rvo" || text == "rvo_lite") return ControllerKind::rvo_lite;
  return std::nullopt;
}

ControllerOutput sph_only_step(const SwarmSnapshot& snap, const Vec2& goal, const SphParams& p) {
  ControllerOutput out;
  out.v_cmd = sph_commands(snap, {}, goal, p);
  out.detector_integrals.resize(snap.size());
  for (std::size_t i = 0; i < snap.size(); ++i) out.detector_integrals[i] = snap.states[i].integral;
  out.detected.assign(snap.size(), false);
  return out;
}

// ---------------------------------------------------------------------------
// Bound

ControllerOutput bound_step(const SwarmSnapshot& snap, std::vector<BoundState>& states,
                            const Vec2& goal, const BoundParams& bp, const DetectorParams& dp) {
  const std::size_t n = snap.size();
  ControllerOutput out;
  out.v_cmd.resize(n);
  out.detector_integrals.resize(n);
  out.detected.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const RobotState& s = snap.states[i];
    BoundState& b = states[i];
    const DetectorUpdate u = update_detector(s.integral, s.v_cmd, s.v_obs, dp);
    out.detector_integrals[i] = u.integral;
    out.detected[i] = u.detected;
    if (u.detected) {
      b.last_point = s.q;
      b.timer = bp.bounce_steps;
      out.new_collisions.push_back(s.q);
    }
    if (b.timer > 0 && b.last_point) {
      Vec2 away = s.q - *b.last_point;
      double len = norm(away);
      if (len < kCoincidentDistance) {
        // Still on the point: retreat along the command that ran into it.
        away = -s.v_cmd;
        len = norm(away);
        if (len == 0.0) {
          away = coincident_direction(i);
          len = 1.0;
        }
      }
      out.v_cmd[i] = away * (bp.v_max / len);
      --b.timer;
    } else {
      out.v_cmd[i] = clamp_norm((goal - s.q) * bp.k_pursuit, bp.v_max);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reciprocal velocity obstacles

namespace {

constexpr double kParallel = 1e-9;

// Optimum on the line of plane `k` subject to planes [0, k) and the speed disk.
bool solve_on_line(const std::vector<HalfPlane>& planes, std::size_t k, double speed,
                   const Vec2& preferred, bool direction_opt, Vec2& result) {
  const HalfPlane& line = planes[k];
  const double dp = dot(line.point, line.direction);
  const double disc = dp * dp + speed * speed - norm2(line.point);
  if (disc < 0.0) return false;
  const double sq = std::sqrt(disc);
  double t_left = -dp - sq;
  double t_right = -dp + sq;
  for (std::size_t i = 0; i < k; ++i) {
    const double denom = cross(line.direction, planes[i].direction);
    const double numer = cross(planes[i].direction, line.point - planes[i].point);
    if (std::abs(denom) <= kParallel) {
      if (numer < 0.0) return false;
      continue;
    }
    const double t = numer / denom;
    if (denom >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }
  if (direction_opt) {
    result = line.point + line.direction * (dot(preferred, line.direction) > 0.0 ? t_right : t_left);
  } else {
    const double t = std::clamp(dot(line.direction, preferred - line.point), t_left, t_right);
    result = line.point + line.direction * t;
  }
  return true;
}

// Returns the index of the first plane that could not be satisfied, or
// planes.size() on success.
std::size_t solve_planes(const std::vector<HalfPlane>& planes, double speed, const Vec2& preferred,
                         bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = preferred * speed;
  } else {
    result = clamp_norm(preferred, speed);
  }
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (cross(planes[i].direction, planes[i].point - result) > 0.0) {
      const Vec2 kept = result;
      if (!solve_on_line(planes, i, speed, preferred, direction_opt, result)) {
        result = kept;
        return i;
      }
    }
  }
  return planes.size();
}

// Infeasible case: minimize the largest violation over planes [begin, end).
void least_violation(const std::vector<HalfPlane>& planes, std::size_t begin, double speed,
                     Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin; i < planes.size(); ++i) {
    if (cross(planes[i].direction, planes[i].point - result) <= distance) continue;
    std::vector<HalfPlane> projected;
    for (std::size_t j = 0; j < i; ++j) {
      HalfPlane line;
      const double det = cross(planes[i].direction, planes[j].direction);
      if (std::abs(det) <= kParallel) {
        if (dot(planes[i].direction, planes[j].direction) > 0.0) continue;
        line.point = (planes[i].point + planes[j].point) * 0.5;
      } else {
        line.point = planes[i].point +
                     planes[i].direction *
                         (cross(planes[j].direction, planes[i].point - planes[j].point) / det);
      }
      const Vec2 dir = planes[j].direction - planes[i].direction;
      line.direction = dir / norm(dir);
      projected.push_back(line);
    }
    const Vec2 kept = result;
    if (solve_planes(projected, speed, perp(planes[i].direction), true, result) <
        projected.size()) {
      result = kept;
    }
    distance = cross(planes[i].direction, planes[i].point - result);
  }
}

HalfPlane reciprocal_plane(const Vec2& rel_pos, const Vec2& rel_vel, const Vec2& own_vel,
                           double combined, double tau, double dt) {
  const double dist2 = norm2(rel_pos);
  const double comb2 = combined * combined;
  HalfPlane line;
  Vec2 u;
  if (dist2 > comb2) {
    const Vec2 w = rel_vel - rel_pos / tau;
    const double w2 = norm2(w);
    const double d1 = dot(w, rel_pos);
    if (d1 < 0.0 && d1 * d1 > comb2 * w2) {
      const double wl = std::sqrt(w2);
      const Vec2 unit_w = w / wl;
      line.direction = {unit_w.y, -unit_w.x};
      u = unit_w * (combined / tau - wl);
    } else {
      const double leg = std::sqrt(dist2 - comb2);
      if (cross(rel_pos, w) > 0.0) {
        line.direction = Vec2{rel_pos.x * leg - rel_pos.y * combined,
                              rel_pos.x * combined + rel_pos.y * leg} /
                         dist2;
      } else {
        line.direction = -Vec2{rel_pos.x * leg + rel_pos.y * combined,
                               -rel_pos.x * combined + rel_pos.y * leg} /
                         dist2;
      }
      u = line.direction * dot(rel_vel, line.direction) - rel_vel;
    }
  } else {
    // Already overlapping: resolve within one step.
    const Vec2 w = rel_vel - rel_pos / dt;
    double wl = norm(w);
    const Vec2 unit_w = wl > 0.0 ? w / wl : Vec2{1.0, 0.0};
    line.direction = {unit_w.y, -unit_w.x};
    u = unit_w * (combined / dt - wl);
  }
  line.point = own_vel + u * 0.5;
  return line;
}

}  // namespace

Vec2 solve_velocity(const std::vector<HalfPlane>& planes, double speed, const Vec2& preferred) {
  Vec2 result;
  const std::size_t failed = solve_planes(planes, speed, preferred, false, result);
  if (failed < planes.size()) least_violation(planes, failed, speed, result);
  return result;
}

ControllerOutput rvo_lite_step(const SwarmSnapshot& snap, const Vec2& goal, const RvoParams& rp) {
  const std::size_t n = snap.size();
  ControllerOutput out;
  out.v_cmd.resize(n);
  out.detector_integrals.resize(n);
  out.detected.assign(n, false);
  const double combined = 2.0 * (rp.radius + rp.margin);

#pragma omp parallel for schedule(static)
  for (long li = 0; li < static_cast<long>(n); ++li) {
    const auto i = static_cast<std::size_t>(li);
    const RobotState& si = snap.states[i];
    std::vector<HalfPlane> planes;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const RobotState& sj = snap.states[j];
      const Vec2 rel_pos = sj.q - si.q;
      if (norm(rel_pos) > rp.neighbor_dist) continue;
      planes.push_back(
          reciprocal_plane(rel_pos, si.v_cmd - sj.v_cmd, si.v_cmd, combined, rp.tau, rp.dt));
    }
    const Vec2 preferred = clamp_norm((goal - si.q) * rp.k_pursuit, rp.v_max);
    out.v_cmd[i] = clamp_norm(solve_velocity(planes, rp.v_max, preferred), rp.v_max);
    out.detector_integrals[i] = si.integral;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Controller wrappers

namespace {

class OursController final : public Controller {
 public:
  explicit OursController(const ControllerConfig& cfg) : cfg_(cfg) {}
  ControllerKind kind() const override { return ControllerKind::ours; }
  ControllerOutput step(const SwarmSnapshot& snap, const Vec2& goal, long step) override {
    return controller_step(snap, map_, goal, cfg_.sph, cfg_.det, step);
  }
  const CollisionMap& collisions() const override { return map_; }

 private:
  ControllerConfig cfg_;
  CollisionMap map_;
};

class SphOnlyController final : public Controller {
 public:
  explicit SphOnlyController(const ControllerConfig& cfg) : cfg_(cfg) {}
  ControllerKind kind() const override { return ControllerKind::sph_only; }
  ControllerOutput step(const SwarmSnapshot& snap, const Vec2& goal, long) override {
    return sph_only_step(snap, goal, cfg_.sph);
  }
  const CollisionMap& collisions() const override { return map_; }

 private:
  ControllerConfig cfg_;
  CollisionMap map_;
};

class BoundController final : public Controller {
 public:
  BoundController(const ControllerConfig& cfg, std::size_t n) : cfg_(cfg), states_(n) {}
  ControllerKind kind() const override { return ControllerKind::bound; }
  ControllerOutput step(const SwarmSnapshot& snap, const Vec2& goal, long step) override {
    ControllerOutput out = bound_step(snap, states_, goal, cfg_.bound, cfg_.det);
    for (std::size_t i = 0; i < snap.size(); ++i) {
      if (out.detected[i]) map_.insert({snap.states[i].q, step, i}, 0.0);
    }
    return out;
  }
  const CollisionMap& collisions() const override { return map_; }

 private:
  ControllerConfig cfg_;
  std::vector<BoundState> states_;
  CollisionMap map_;
};

class RvoController final : public Controller {
 public:
  explicit RvoController(const ControllerConfig& cfg) : cfg_(cfg) {}
  ControllerKind kind() const override { return ControllerKind::rvo_lite; }
  ControllerOutput step(const SwarmSnapshot& snap, const Vec2& goal, long) override {
    return rvo_lite_step(snap, goal, cfg_.rvo);
  }
  const CollisionMap& collisions() const override { return map_; }

 private:
  ControllerConfig cfg_;
  CollisionMap map_;
};

}  // namespace

std::unique_ptr<Controller> make_controller(ControllerKind kind, const ControllerConfig& cfg,
                                            std::size_t n_robots) {
  switch (kind) {
    case ControllerKind::ours: return std::make_unique<OursController>(cfg);
    case ControllerKind::sph_only: return std::make_unique<SphOnlyController>(cfg);
    case ControllerKind::bound: return std::make_unique<BoundController>(cfg, n_robots);
    case ControllerKind::rvo_lite: return std::make_unique<RvoController>(cfg);
  }
  return nullptr;
}

}  // namespace swarm
