#pragma once

// Small seeded generators for the property tests.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "swarm/bench.hpp"
#include "swarm/sph.hpp"
#include "swarm/world.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<unsigned>(hi - lo + 1)); }
  bool coin() { return (eng_() & 1u) != 0; }

  swarm::Vec2 point(double extent) { return {uniform(0.0, extent), uniform(0.0, extent)}; }

  swarm::Vec2 in_disk(double radius) {
    const double r = radius * std::sqrt(uniform(0.0, 1.0));
    const double a = uniform(-std::numbers::pi, std::numbers::pi);
    return {r * std::cos(a), r * std::sin(a)};
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Robots scattered over a square with velocities inside the speed cap.
inline swarm::SwarmSnapshot swarm(Rng& rng, std::size_t n, double extent, double v_max) {
  swarm::SwarmSnapshot s;
  s.states.resize(n);
  for (auto& r : s.states) {
    r.q = rng.point(extent);
    r.v_cmd = rng.in_disk(v_max);
    r.v_obs = rng.in_disk(v_max);
    r.theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    r.integral = rng.uniform(0.0, 1.0);
  }
  return s;
}

inline std::vector<swarm::Vec2> points(Rng& rng, std::size_t n, double extent) {
  std::vector<swarm::Vec2> out(n);
  for (auto& p : out) p = rng.point(extent);
  return out;
}

// Parameters with every force term switched on, kept independent of the
// shipped defaults.
inline swarm::SphParams busy_params() {
  swarm::SphParams p;
  p.h = 0.1;
  p.mass = 0.05;
  p.mu = 0.3;
  p.stiffness = 0.05;
  p.rho0 = 2.0;
  p.k_rep = 0.01;
  p.k_p = 1.5;
  p.k_d = 0.4;
  p.k_obs = 0.02;
  return p;
}

// Every .scn file shipped next to the "open" scenario, in name order.
inline std::vector<swarm::Scenario> bundled_scenarios() {
  const auto dir = swarm::resolve_scenario_path("open").parent_path();
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".scn") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<swarm::Scenario> out;
  for (const auto& f : files) out.push_back(swarm::load_scenario(f));
  return out;
}

inline bool near_rel(double a, double b, double rel, double floor = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(b), floor);
}

}  // namespace gen
