#include "swarm/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace swarm {

namespace {

double to_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("parameter '" + std::string(key) + "': bad number '" +
                                std::string(text) + "'");
  }
  return v;
}

int to_int(std::string_view key, std::string_view text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("parameter '" + std::string(key) + "': bad integer '" +
                                std::string(text) + "'");
  }
  return v;
}

struct Entry {
  std::string key;
  std::function<std::string(const SimParams&)> get;
  std::function<void(SimParams&, std::string_view)> set;
};

Entry real(std::string key, double SimParams::*field) {
  return {key, [field](const SimParams& p) { return format_double(p.*field); },
          [key, field](SimParams& p, std::string_view v) { p.*field = to_double(key, v); }};
}

template <typename Group>
Entry real(std::string key, Group ControllerConfig::*group, double Group::*field) {
  return {key, [group, field](const SimParams& p) { return format_double(p.ctrl.*group.*field); },
          [key, group, field](SimParams& p, std::string_view v) {
            p.ctrl.*group.*field = to_double(key, v);
          }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    using C = ControllerConfig;
    t.push_back(real("sph.h", &C::sph, &SphParams::h));
    t.push_back(real("sph.kappa", &C::sph, &SphParams::kappa));
    t.push_back(real("sph.mass", &C::sph, &SphParams::mass));
    t.push_back(real("sph.mu", &C::sph, &SphParams::mu));
    t.push_back(real("sph.stiffness", &C::sph, &SphParams::stiffness));
    t.push_back(real("sph.rho0", &C::sph, &SphParams::rho0));
    t.push_back(real("sph.gamma", &C::sph, &SphParams::gamma));
    t.push_back(real("sph.k_rep", &C::sph, &SphParams::k_rep));
    t.push_back(real("sph.k_p", &C::sph, &SphParams::k_p));
    t.push_back(real("sph.k_d", &C::sph, &SphParams::k_d));
    t.push_back(real("sph.k_obs", &C::sph, &SphParams::k_obs));
    t.push_back(real("sph.v_max", &C::sph, &SphParams::v_max));
    t.push_back({"sph.kernel",
                 [](const SimParams& p) {
                   return std::string(p.ctrl.sph.convention == KernelConvention::normalized
                                          ? "normalized"
                                          : "literal");
                 },
                 [](SimParams& p, std::string_view v) {
                   if (v == "normalized") {
                     p.ctrl.sph.convention = KernelConvention::normalized;
                   } else if (v == "literal") {
                     p.ctrl.sph.convention = KernelConvention::literal;
                   } else {
                     throw std::invalid_argument("sph.kernel must be normalized|literal");
                   }
                 }});
    t.push_back({"sph.neighbors",
                 [](const SimParams& p) {
                   return std::string(p.ctrl.sph.neighbor_mode == NeighborMode::grid ? "grid"
                                                                                     : "brute");
                 },
                 [](SimParams& p, std::string_view v) {
                   if (v == "grid") {
                     p.ctrl.sph.neighbor_mode = NeighborMode::grid;
                   } else if (v == "brute") {
                     p.ctrl.sph.neighbor_mode = NeighborMode::brute_force;
                   } else {
                     throw std::invalid_argument("sph.neighbors must be grid|brute");
                   }
                 }});
    t.push_back(real("det.zeta", &C::det, &DetectorParams::zeta));
    t.push_back(real("det.i_thr", &C::det, &DetectorParams::i_thr));
    t.push_back(real("det.dedup_radius", &C::det, &DetectorParams::dedup_radius));
    t.push_back(real("det.v_max", &C::det, &DetectorParams::v_max));
    t.push_back({"det.metric",
                 [](const SimParams& p) {
                   return std::string(p.ctrl.det.metric == TrackingError::speed ? "speed"
                                                                                : "vector");
                 },
                 [](SimParams& p, std::string_view v) {
                   if (v == "speed") {
                     p.ctrl.det.metric = TrackingError::speed;
                   } else if (v == "vector") {
                     p.ctrl.det.metric = TrackingError::vector;
                   } else {
                     throw std::invalid_argument("det.metric must be speed|vector");
                   }
                 }});
    t.push_back(real("bound.k_pursuit", &C::bound, &BoundParams::k_pursuit));
    t.push_back(real("bound.v_max", &C::bound, &BoundParams::v_max));
    t.push_back({"bound.bounce_steps",
                 [](const SimParams& p) { return std::to_string(p.ctrl.bound.bounce_steps); },
                 [](SimParams& p, std::string_view v) {
                   p.ctrl.bound.bounce_steps = to_int("bound.bounce_steps", v);
                 }});
    t.push_back(real("rvo.tau", &C::rvo, &RvoParams::tau));
    t.push_back(real("rvo.k_pursuit", &C::rvo, &RvoParams::k_pursuit));
    t.push_back(real("rvo.margin", &C::rvo, &RvoParams::margin));
    t.push_back(real("rvo.neighbor_dist", &C::rvo, &RvoParams::neighbor_dist));
    t.push_back(real("rvo.v_max", &C::rvo, &RvoParams::v_max));
    t.push_back(real("vehicle.d", &SimParams::d));
    t.push_back(real("vehicle.v_wheel_max", &SimParams::v_wheel_max));
    t.push_back(real("vehicle.omega_max", &SimParams::omega_max));
    t.push_back({"world.contact",
                 [](const SimParams& p) {
                   return std::string(p.contact == ContactMode::slide ? "slide" : "stick");
                 },
                 [](SimParams& p, std::string_view v) {
                   if (v == "slide") {
                     p.contact = ContactMode::slide;
                   } else if (v == "stick") {
                     p.contact = ContactMode::stick;
                   } else {
                     throw std::invalid_argument("world.contact must be slide|stick");
                   }
                 }});
    std::sort(t.begin(), t.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
    return t;
  }();
  return table;
}

}  // namespace

void SimParams::set_dt(double dt) {
  ctrl.sph.dt = dt;
  ctrl.rvo.dt = dt;
}

VehicleParams SimParams::vehicle(const Scenario& sc) const {
  return VehicleParams(sc.robot_radius - d, d, v_wheel_max, omega_max);
}

void SimParams::validate() const {
  ctrl.sph.validate();
  ctrl.det.validate();
  if (ctrl.bound.bounce_steps < 0) throw std::invalid_argument("bound.bounce_steps must be >= 0");
  if (!(ctrl.bound.k_pursuit >= 0.0)) throw std::invalid_argument("bound.k_pursuit must be >= 0");
  if (!(ctrl.bound.v_max > 0.0)) throw std::invalid_argument("bound.v_max must be > 0");
  if (!(ctrl.rvo.tau > 0.0)) throw std::invalid_argument("rvo.tau must be > 0");
  if (!(ctrl.rvo.k_pursuit >= 0.0)) throw std::invalid_argument("rvo.k_pursuit must be >= 0");
  if (!(ctrl.rvo.radius > 0.0)) throw std::invalid_argument("rvo.radius must be > 0");
  if (!(ctrl.rvo.margin >= 0.0)) throw std::invalid_argument("rvo.margin must be >= 0");
  if (!(ctrl.rvo.neighbor_dist > 0.0)) throw std::invalid_argument("rvo.neighbor_dist must be > 0");
  if (!(ctrl.rvo.v_max > 0.0)) throw std::invalid_argument("rvo.v_max must be > 0");
  if (!(d > 0.0)) throw std::invalid_argument("vehicle.d must be > 0");
  if (!(v_wheel_max > 0.0)) throw std::invalid_argument("vehicle.v_wheel_max must be > 0");
  if (!(omega_max > 0.0)) throw std::invalid_argument("vehicle.omega_max must be > 0");
}

SimParams default_params() {
  SimParams p;
  SphParams& s = p.ctrl.sph;
  s.h = 0.2;
  s.kappa = 2.0;
  s.mass = 0.05;
  s.mu = 0.02;
  s.stiffness = 0.02;
  s.rho0 = 3.2;
  s.gamma = 7.0;
  s.k_rep = 0.002;
  s.k_p = 2.0;
  s.k_d = 1.0;
  s.k_obs = 0.005;
  s.dt = 0.1;
  s.v_max = 0.2;

  p.ctrl.det.v_max = s.v_max;
  p.ctrl.det.zeta = 0.7;
  p.ctrl.det.i_thr = 2.5;
  p.ctrl.det.dedup_radius = 0.01;

  p.ctrl.bound.v_max = s.v_max;
  p.ctrl.rvo.v_max = s.v_max;
  p.ctrl.rvo.dt = s.dt;
  return p;
}

std::vector<std::string> parameter_keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(e.key);
  return out;
}

void apply_override(SimParams& params, std::string_view key, std::string_view value) {
  for (const auto& e : entries()) {
    if (e.key == key) {
      e.set(params, value);
      return;
    }
  }
  throw std::invalid_argument("unknown parameter '" + std::string(key) + "'");
}

std::pair<std::string, std::string> split_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("expected key=value, got '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

std::string describe(const SimParams& params) {
  std::ostringstream out;
  for (const auto& e : entries()) out << e.key << "=" << e.get(params) << "\n";
  return out.str();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace swarm
