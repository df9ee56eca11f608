#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarm/obstacle.hpp"
#include "swarm/sph.hpp"

namespace swarm {

enum class ControllerKind { ours, sph_only, bound, rvo_lite };

inline constexpr ControllerKind kAllControllers[] = {ControllerKind::ours, ControllerKind::sph_only,
                                                     ControllerKind::bound,
                                                     ControllerKind::rvo_lite};

// CLI spelling: ours | sph | bound | rvo.
std::string_view to_string(ControllerKind kind);
// Accepts the CLI spelling and the long names (sph_only, rvo_lite).
std::optional<ControllerKind> parse_controller_kind(std::string_view text);

// Plain SPH controller: no detector and no collision-point term.
ControllerOutput sph_only_step(const SwarmSnapshot& snap, const Vec2& goal, const SphParams& p);

// Individually controlled robots that back away from their own last
// collision point.
struct BoundParams {
  double k_pursuit = 0.8;  // proportional pursuit gain [1/s]
  int bounce_steps = 10;   // steps spent backing away after a detection
  double v_max = 0.2;
};

struct BoundState {
  std::optional<Vec2> last_point;
  int timer = 0;  // bounce steps remaining, >= 0
};

// `states` holds one entry per robot and is updated in place. Detections use
// the same tracking-error integrator as the SPH controller; points are
// returned in new_collisions but never shared between robots.
ControllerOutput bound_step(const SwarmSnapshot& snap, std::vector<BoundState>& states,
                            const Vec2& goal, const BoundParams& bp, const DetectorParams& dp);

// Reciprocal half-plane avoidance among robot disks; obstacles are invisible.
struct RvoParams {
  double tau = 2.0;             // time horizon [s]
  double k_pursuit = 1.0;       // preferred velocity = clamp(k * (goal - q))
  double radius = 0.0325;       // robot disk radius [m]
  double margin = 0.004;        // extra clearance per robot [m]
  double neighbor_dist = 0.6;   // neighbors farther than this are ignored [m]
  double v_max = 0.2;
  double dt = 0.1;
};

ControllerOutput rvo_lite_step(const SwarmSnapshot& snap, const Vec2& goal, const RvoParams& rp);

// Half-plane {v : cross(direction, point - v) <= 0}.
struct HalfPlane {
  Vec2 point;
  Vec2 direction;  // unit
};

// Velocity closest to `preferred` inside the disk of radius `speed` and all
// half-planes; when they are infeasible, the velocity minimizing the largest
// violation.
Vec2 solve_velocity(const std::vector<HalfPlane>& planes, double speed, const Vec2& preferred);

struct ControllerConfig {
  SphParams sph;
  DetectorParams det;
  BoundParams bound;
  RvoParams rvo;
};

// Stateful wrapper giving all four controllers one interface.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControllerKind kind() const = 0;
  virtual ControllerOutput step(const SwarmSnapshot& snap, const Vec2& goal, long step) = 0;
  // Points registered so far (own points for bound, none for sph/rvo).
  virtual const CollisionMap& collisions() const = 0;
};

std::unique_ptr<Controller> make_controller(ControllerKind kind, const ControllerConfig& cfg,
                                            std::size_t n_robots);

}  // namespace swarm
