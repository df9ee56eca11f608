#pragma once

#include "swarm/vec2.hpp"

namespace swarm {

// Differential-drive geometry and actuator limits. The controlled point is
// the effective center, offset `d` ahead of the axle center; it behaves as a
// holonomic disk of radius R = r + d.
class VehicleParams {
 public:
  // Throws std::invalid_argument unless r > 0, d > 0 and both limits > 0.
  VehicleParams(double r, double d, double v_wheel_max, double omega_max);

  double r() const { return r_; }
  double d() const { return d_; }
  double radius() const { return r_ + d_; }
  double v_wheel_max() const { return v_wheel_max_; }
  double omega_max() const { return omega_max_; }

 private:
  double r_;
  double d_;
  double v_wheel_max_;
  double omega_max_;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // wrapped to (-pi, pi]
};

struct UnicycleCmd {
  double v = 0.0;
  double omega = 0.0;
};

double wrap_angle(double a);

// Feedback linearization at the effective center, then joint scaling of
// (v, omega) when either limit is exceeded so the path curvature is kept.
UnicycleCmd to_unicycle(const Vec2& v_cmd, double theta, const VehicleParams& vp);

Vec2 effective_center(const Pose& pose, const VehicleParams& vp);

// Body pose whose effective center is `center` at heading `theta`.
Pose pose_from_center(const Vec2& center, double theta, const VehicleParams& vp);

// Exact constant-(v, omega) integration over dt.
Pose step_unicycle(const Pose& pose, const UnicycleCmd& cmd, double dt);

}  // namespace swarm
