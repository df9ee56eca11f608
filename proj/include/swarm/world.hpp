#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarm/vec2.hpp"
#include "swarm/vehicle.hpp"

namespace swarm {

// Maximum allowed interpenetration after contact resolution [m].
inline constexpr double kPenetrationTolerance = 1e-6;
// Radius of the arrival disk around the goal [m] and arrival speed bound [m/s].
inline constexpr double kArrivalRadius = 0.15;
inline constexpr double kArrivalSpeed = 0.1;

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ScenarioValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Polygon {
  std::string name;
  std::vector<Vec2> vertices;  // counter-clockwise
};

struct Scenario {
  std::string name;
  double width = 0.9;
  double height = 0.9;
  std::vector<Polygon> obstacles;
  Vec2 start_min;           // lower-left corner of the start square
  double start_size = 0.0;  // edge length of the start square
  Vec2 goal;
  std::size_t n_robots = 1;
  double robot_radius = 0.0325;  // collision radius of the effective-center disk
  std::uint64_t rng_seed = 0;

  // Throws ScenarioValidationError naming the violated rule.
  void validate() const;
};

// Parses the line-oriented scenario format (see scenarios/README.md).
// Throws ScenarioParseError with the offending line, then validates.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

// Canonical text form; parse_scenario(to_text(s)) == s.
std::string to_text(const Scenario& sc);
// FNV-1a 64 over the canonical text.
std::uint64_t content_hash(const Scenario& sc);

double signed_area(std::span<const Vec2> polygon);
bool point_in_polygon(const Vec2& p, std::span<const Vec2> polygon);
// Closest point on segment [a, b] to p.
Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b);
// Distance from p to the solid polygon (0 inside).
double distance_to_polygon(const Vec2& p, std::span<const Vec2> polygon);

// Seeded rejection sampling of effective centers inside the start square,
// with uniform headings. Returns body poses.
std::vector<Pose> spawn_swarm(const Scenario& sc, std::uint64_t seed, const VehicleParams& vp);

enum class ContactKind { wall, robot };
enum class ContactMode { slide, stick };

struct ContactReport {
  std::size_t robot = 0;
  ContactKind kind = ContactKind::wall;
  Vec2 normal;  // unit, pointing away from the obstacle / other robot
  Vec2 point;   // contact location on the obstacle surface
};

struct ContactResult {
  std::vector<Vec2> positions;
  std::vector<ContactReport> contacts;
  bool converged = true;
};

// Moves disks from `current` toward `proposed`, clipping each motion against
// obstacles and the field boundary, then separating overlapping disks.
ContactResult resolve_contacts(std::span<const Vec2> proposed, std::span<const Vec2> current,
                               const Scenario& sc, double radius,
                               ContactMode mode = ContactMode::slide);

// Largest penetration of any disk into an obstacle, the boundary or another
// disk. Zero for a feasible configuration.
double max_penetration(std::span<const Vec2> centers, const Scenario& sc, double radius);

struct WorldState {
  std::vector<Pose> poses;
  long step = 0;
  double sim_time = 0.0;
  std::vector<ContactReport> contacts;
  bool converged = true;
};

std::vector<Vec2> effective_centers(const WorldState& w, const VehicleParams& vp);

WorldState world_step(const WorldState& w, std::span<const UnicycleCmd> cmds, const Scenario& sc,
                      const VehicleParams& vp, double dt, ContactMode mode = ContactMode::slide);

// Every effective center within kArrivalRadius of the goal and every observed
// speed at most kArrivalSpeed.
bool goal_reached(std::span<const Vec2> centers, const Scenario& sc, std::span<const Vec2> v_obs);

}  // namespace swarm
