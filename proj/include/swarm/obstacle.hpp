#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swarm/sph.hpp"
#include "swarm/vec2.hpp"

namespace swarm {

// How the detector measures tracking error. `speed` compares magnitudes,
// |‖v_cmd‖ - ‖v_obs‖|; `vector` uses ‖v_cmd - v_obs‖ and also catches
// direction errors such as sliding along a wall.
enum class TrackingError { speed, vector };

struct DetectorParams {
  double v_max = 0.2;          // normalization speed [m/s]
  double zeta = 0.3;           // attenuation subtracted every step
  double i_thr = 1.0;          // detection threshold
  double dedup_radius = 0.02;  // collision-point merge distance [m]
  TrackingError metric = TrackingError::speed;

  void validate() const;
};

struct CollisionPoint {
  Vec2 c;
  long step = 0;
  std::size_t robot = 0;
};

// Append-only set of inferred contact locations, shared by the whole swarm.
// No two points are closer than the dedup radius used to insert them.
class CollisionMap {
 public:
  const std::vector<CollisionPoint>& points() const { return points_; }
  std::vector<Vec2> positions() const;
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  void clear() { points_.clear(); }

  // First-wins insertion: returns false and leaves the map unchanged when an
  // existing point is closer than `dedup_radius`.
  bool insert(const CollisionPoint& point, double dedup_radius);

 private:
  std::vector<CollisionPoint> points_;
};

struct ControllerOutput {
  std::vector<Vec2> v_cmd;
  std::vector<Vec2> new_collisions;
  std::vector<double> detector_integrals;
  std::vector<bool> detected;
};

struct DetectorUpdate {
  double integral = 0.0;
  bool detected = false;
};

// Finite-difference velocity over one control period.
Vec2 observe_velocity(const Vec2& q_now, const Vec2& q_prev, double dt);

// One step of the leaky tracking-error integrator. The integral never drops
// below zero and resets to zero when it reaches the threshold.
DetectorUpdate update_detector(double integral, const Vec2& v_cmd, const Vec2& v_obs,
                               const DetectorParams& dp);

bool register_collision(CollisionMap& map, const Vec2& q, long step, std::size_t robot,
                        const DetectorParams& dp);

// Direction used when a robot sits on a collision point: straight back along
// the command it was blocked on, or the per-index unit vector when at rest.
Vec2 obstacle_guard_direction(std::size_t robot, const Vec2& v_cmd);

// K_obs * sum_k (q_i - c_k) / |q_i - c_k|^2 * W(|q_i - c_k|). `idx` must have
// been built over `points`.
Vec2 obstacle_repulsion(const Vec2& q, const Vec2& guard, std::span<const Vec2> points,
                        const NeighborIndex& idx, const SphParams& p);

// Velocity commands of the SPH controller: caches, f_sph + f_rep + f_pos, plus
// f_obs when k_obs != 0 and `points` is non-empty, then the Euler update.
std::vector<Vec2> sph_commands(const SwarmSnapshot& snap, std::span<const Vec2> points,
                               const Vec2& goal, const SphParams& p);

// Full controller step with indirect obstacle detection. Detectors compare the
// previous command with the current observed velocity; detections are
// registered into `map` in robot-id order before forces are evaluated.
ControllerOutput controller_step(const SwarmSnapshot& snap, CollisionMap& map, const Vec2& goal,
                                 const SphParams& p, const DetectorParams& dp, long step);

}  // namespace swarm
