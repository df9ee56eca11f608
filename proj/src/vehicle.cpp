#include "swarm/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swarm {

VehicleParams::VehicleParams(double r, double d, double v_wheel_max, double omega_max)
    : r_(r), d_(d), v_wheel_max_(v_wheel_max), omega_max_(omega_max) {
  if (!(r > 0.0)) throw std::invalid_argument("VehicleParams: r must be > 0");
  if (!(d > 0.0)) throw std::invalid_argument("VehicleParams: d must be > 0");
  if (!(v_wheel_max > 0.0) || !(omega_max > 0.0)) {
    throw std::invalid_argument("VehicleParams: actuator limits must be > 0");
  }
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a > std::numbers::pi) a -= two_pi;
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

UnicycleCmd to_unicycle(const Vec2& v_cmd, double theta, const VehicleParams& vp) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  UnicycleCmd cmd{c * v_cmd.x + s * v_cmd.y, (-s * v_cmd.x + c * v_cmd.y) / vp.d()};
  double scale = 1.0;
  if (std::abs(cmd.v) > vp.v_wheel_max()) scale = vp.v_wheel_max() / std::abs(cmd.v);
  if (std::abs(cmd.omega) > vp.omega_max()) {
    scale = std::min(scale, vp.omega_max() / std::abs(cmd.omega));
  }
  cmd.v *= scale;
  cmd.omega *= scale;
  return cmd;
}

Vec2 effective_center(const Pose& pose, const VehicleParams& vp) {
  return {pose.x + vp.d() * std::cos(pose.theta), pose.y + vp.d() * std::sin(pose.theta)};
}

Pose pose_from_center(const Vec2& center, double theta, const VehicleParams& vp) {
  return {center.x - vp.d() * std::cos(theta), center.y - vp.d() * std::sin(theta),
          wrap_angle(theta)};
}

Pose step_unicycle(const Pose& pose, const UnicycleCmd& cmd, double dt) {
  Pose next = pose;
  if (std::abs(cmd.omega) < 1e-9) {
    next.x += cmd.v * std::cos(pose.theta) * dt;
    next.y += cmd.v * std::sin(pose.theta) * dt;
    next.theta = wrap_angle(pose.theta + cmd.omega * dt);
    return next;
  }
  const double th1 = pose.theta + cmd.omega * dt;
  const double radius = cmd.v / cmd.omega;
  next.x += radius * (std::sin(th1) - std::sin(pose.theta));
  next.y -= radius * (std::cos(th1) - std::cos(pose.theta));
  next.theta = wrap_angle(th1);
  return next;
}

}  // namespace swarm
