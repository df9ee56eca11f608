#include "swarm/sph_reference.hpp"

#include "swarm/obstacle.hpp"

namespace swarm::reference {

std::vector<double> densities(std::span<const RobotState> states, const SphParams& p) {
  std::vector<double> rho(states.size(), 0.0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      rho[i] += p.mass * kernel_weight(norm(states[i].q - states[j].q), p);
    }
  }
  return rho;
}

std::vector<Tensor2> stresses(std::span<const RobotState> states, std::span<const double> rho,
                              const SphParams& p) {
  std::vector<Tensor2> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    Tensor2 g;
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (j == i) continue;
      const Vec2 grad = kernel_gradient(states[i].q - states[j].q, p);
      if (grad.x == 0.0 && grad.y == 0.0) continue;
      const double vol = p.mass / rho[j];
      const Vec2 dv = states[j].v_cmd - states[i].v_cmd;
      g.xx += vol * dv.x * grad.x;
      g.xy += vol * dv.x * grad.y;
      g.yx += vol * dv.y * grad.x;
      g.yy += vol * dv.y * grad.y;
    }
    out[i] = compute_stress(compute_pressure(rho[i], p), g, p);
  }
  return out;
}

std::vector<Vec2> sph_forces(std::span<const RobotState> states, std::span<const double> rho,
                             std::span<const Tensor2> sigma, const SphParams& p) {
  std::vector<Vec2> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const Tensor2 ti = sigma[i] * (1.0 / (rho[i] * rho[i]));
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (j == i) continue;
      const Vec2 grad = kernel_gradient(states[i].q - states[j].q, p);
      if (grad.x == 0.0 && grad.y == 0.0) continue;
      const Tensor2 tj = sigma[j] * (1.0 / (rho[j] * rho[j]));
      out[i] += ((ti + tj) * grad) * p.mass;
    }
  }
  return out;
}

std::vector<Vec2> repulsions(std::span<const RobotState> states, const SphParams& p) {
  std::vector<Vec2> out(states.size());
  if (p.k_rep == 0.0) return out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    Vec2 f;
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (j == i) continue;
      const Vec2 guard = i < j ? coincident_direction(i) : -coincident_direction(j);
      f += repulsion_term(states[i].q - states[j].q, guard, p);
    }
    out[i] = f * p.k_rep;
  }
  return out;
}

std::vector<Vec2> obstacle_repulsions(std::span<const RobotState> states,
                                      std::span<const Vec2> points, const SphParams& p) {
  std::vector<Vec2> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    Vec2 f;
    const Vec2 guard = obstacle_guard_direction(i, states[i].v_cmd);
    for (const Vec2& c : points) f += repulsion_term(states[i].q - c, guard, p);
    out[i] = f * p.k_obs;
  }
  return out;
}

std::vector<Vec2> total_forces(std::span<const RobotState> states, std::span<const Vec2> points,
                               const Vec2& goal, const SphParams& p) {
  const auto rho = densities(states, p);
  const auto sigma = stresses(states, rho, p);
  const auto fs = sph_forces(states, rho, sigma, p);
  const auto fr = repulsions(states, p);
  std::vector<Vec2> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    out[i] = fs[i] + fr[i] + position_force(states[i], goal, p);
  }
  if (p.k_obs != 0.0 && !points.empty()) {
    const auto fo = obstacle_repulsions(states, points, p);
    for (std::size_t i = 0; i < states.size(); ++i) out[i] += fo[i];
  }
  return out;
}

}  // namespace swarm::reference
