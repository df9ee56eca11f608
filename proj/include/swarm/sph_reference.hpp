#pragma once

#include <span>
#include <vector>

#include "swarm/sph.hpp"

// Serial all-pairs versions of the swarm kernels. They share the scalar
// primitives (kernel, pressure, stress) with the parallel path but use no
// neighbor index and no threading; tests compare the two bit for bit.
namespace swarm::reference {

std::vector<double> densities(std::span<const RobotState> states, const SphParams& p);

std::vector<Tensor2> stresses(std::span<const RobotState> states, std::span<const double> rho,
                              const SphParams& p);

std::vector<Vec2> sph_forces(std::span<const RobotState> states, std::span<const double> rho,
                             std::span<const Tensor2> sigma, const SphParams& p);

std::vector<Vec2> repulsions(std::span<const RobotState> states, const SphParams& p);

std::vector<Vec2> obstacle_repulsions(std::span<const RobotState> states,
                                      std::span<const Vec2> points, const SphParams& p);

// f_sph + f_rep + f_pos (+ f_obs when points are given and k_obs != 0).
std::vector<Vec2> total_forces(std::span<const RobotState> states, std::span<const Vec2> points,
                               const Vec2& goal, const SphParams& p);

}  // namespace swarm::reference
