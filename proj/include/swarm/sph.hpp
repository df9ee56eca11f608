#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swarm/vec2.hpp"

namespace swarm {

// Exponent convention of the Gaussian kernel. `normalized` evaluates
// exp(-R^2) with R = r/h; `literal` evaluates exp(-R^2/h^2), dividing by h a
// second time.
enum class KernelConvention { normalized, literal };

// Candidate generation for the compact-support sums. Both modes yield the
// same values; `brute_force` visits every robot and is the O(N^2) mode used
// for timing reproduction.
enum class NeighborMode { grid, brute_force };

// Distance below which two points are treated as coincident.
inline constexpr double kCoincidentDistance = 1e-6;

struct SphParams {
  double h = 0.1;           // smoothing length [m]
  double kappa = 2.0;       // support multiplier
  double mass = 0.05;       // per-robot mass [kg]
  double mu = 0.0;          // viscosity coefficient
  double stiffness = 0.0;   // K in the equation of state
  double rho0 = 1.0;        // reference density [kg/m^2]
  double gamma = 7.0;       // adiabatic constant
  double k_rep = 0.0;       // inter-robot repulsion gain
  double k_p = 0.0;         // position gain
  double k_d = 0.0;         // damping gain
  double k_obs = 0.0;       // collision-point repulsion gain
  double dt = 0.1;          // control period [s]
  double v_max = 0.2;       // speed cap [m/s]
  KernelConvention convention = KernelConvention::normalized;
  NeighborMode neighbor_mode = NeighborMode::grid;

  double support() const { return kappa * h; }

  // Throws std::invalid_argument naming the violated bound.
  void validate() const;
};

struct RobotState {
  Vec2 q;          // controlled point (effective center) [m]
  Vec2 v_cmd;      // last commanded velocity [m/s]
  Vec2 v_obs;      // observed velocity [m/s]
  double theta = 0.0;
  double integral = 0.0;  // collision detector accumulator, >= 0
};

struct SwarmSnapshot {
  std::vector<RobotState> states;
  // Caches; either empty or one entry per state.
  std::vector<double> densities;
  std::vector<Tensor2> stresses;

  std::size_t size() const { return states.size(); }
  std::vector<Vec2> positions() const;
};

// Uniform grid with cell edge >= kappa*h over robots and (separately) over
// collision points. Queries return ids in ascending order so that every
// neighbor sum is accumulated in the same order as a plain 0..N-1 scan.
class NeighborIndex {
 public:
  NeighborIndex() = default;
  NeighborIndex(std::span<const Vec2> robots, std::span<const Vec2> points, double cell,
                NeighborMode mode);

  void robots_near(const Vec2& q, std::vector<std::size_t>& out) const;
  void points_near(const Vec2& q, std::vector<std::size_t>& out) const;

  double cell_size() const { return robots_.cell; }

 private:
  struct Grid {
    Vec2 origin;
    double cell = 1.0;
    long nx = 0;
    long ny = 0;
    std::size_t count = 0;
    bool brute = false;
    std::vector<std::size_t> cell_start;  // CSR offsets, size nx*ny + 1
    std::vector<std::size_t> ids;

    void build(std::span<const Vec2> pts, double min_cell, bool brute_force);
    void query(const Vec2& q, std::vector<std::size_t>& out) const;
  };

  Grid robots_;
  Grid points_;
};

NeighborIndex build_neighbor_index(const SwarmSnapshot& snap, std::span<const Vec2> extra_points,
                                   const SphParams& p);

// Gaussian kernel W(r) [1/m^2]; exactly zero beyond kappa*h.
double kernel_weight(double r, const SphParams& p);

// Gradient of W(|dq|) with respect to q_i, where dq = q_i - q_j.
Vec2 kernel_gradient(const Vec2& dq, const SphParams& p);

// Deterministic substitute direction for coincident points: (1,0) rotated by
// index times the golden angle.
Vec2 coincident_direction(std::size_t index);

// (dq / |dq|^2) * W(|dq|), with dq replaced by kCoincidentDistance * `guard`
// when |dq| < kCoincidentDistance.
Vec2 repulsion_term(const Vec2& dq, const Vec2& guard, const SphParams& p);

// rho_i = sum_j m W(R_ij), self term included.
double compute_density(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
                       const SphParams& p);

// Difference-form estimate of the commanded-velocity gradient at robot i:
// result.ab = d v^a / d b. Requires the density cache.
Tensor2 velocity_gradient(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
                          const SphParams& p);

double compute_pressure(double rho, const SphParams& p);

// Total (pressure + viscous) stress; symmetric.
Tensor2 compute_stress(double pressure, const Tensor2& grad_v, const SphParams& p);

// Requires density and stress caches.
Vec2 sph_force(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
               const SphParams& p);

Vec2 inter_robot_repulsion(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
                           const SphParams& p);

// K_p * (goal - q) - K_d * v_obs.
Vec2 position_force(const RobotState& state, const Vec2& goal, const SphParams& p);

// Forward Euler step followed by the V_max speed clamp.
Vec2 integrate_velocity(const Vec2& v, const Vec2& dvdt, const SphParams& p);

// Fills snap.densities, then snap.stresses. Parallel over robots.
void compute_caches(SwarmSnapshot& snap, const NeighborIndex& idx, const SphParams& p);

// f_sph + f_rep + f_pos for every robot. Requires caches. Parallel over robots.
std::vector<Vec2> swarm_forces(const SwarmSnapshot& snap, const NeighborIndex& idx,
                               const Vec2& goal, const SphParams& p);

}  // namespace swarm
