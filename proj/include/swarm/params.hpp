#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swarm/baselines.hpp"
#include "swarm/vehicle.hpp"
#include "swarm/world.hpp"

namespace swarm {

// Every tunable constant of a trial. Keys for overrides are listed by
// `parameter_keys()`, e.g. "sph.k_p", "det.zeta", "bound.bounce_steps".
struct SimParams {
  ControllerConfig ctrl;
  double d = 0.02;             // effective-center offset [m]
  double v_wheel_max = 0.3;    // forward speed limit [m/s]
  double omega_max = 25.0;     // yaw-rate limit [rad/s]
  ContactMode contact = ContactMode::slide;

  // Sets the control period everywhere it is used.
  void set_dt(double dt);
  VehicleParams vehicle(const Scenario& sc) const;
  void validate() const;
};

// The shipped default set ("default"); see README for provenance.
SimParams default_params();

std::vector<std::string> parameter_keys();

// Throws std::invalid_argument for an unknown key or a malformed value.
void apply_override(SimParams& params, std::string_view key, std::string_view value);

// Splits "key=value".
std::pair<std::string, std::string> split_override(std::string_view text);

// Sorted "key=value" lines covering every parameter, with shortest
// round-trip number formatting.
std::string describe(const SimParams& params);

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace swarm
