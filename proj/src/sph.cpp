#include "swarm/sph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swarm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SphParams: ") + what);
}

// Per-thread candidate buffer for the parallel per-robot loops.
std::vector<std::size_t>& scratch() {
  thread_local std::vector<std::size_t> buf;
  return buf;
}

double exponent_scale(const SphParams& p) {
  return p.convention == KernelConvention::normalized ? 1.0 : 1.0 / (p.h * p.h);
}

}  // namespace

void SphParams::validate() const {
  require(h > 0.0, "h must be > 0");
  require(kappa > 0.0, "kappa must be > 0");
  require(mass > 0.0, "mass must be > 0");
  require(rho0 > 0.0, "rho0 must be > 0");
  require(gamma >= 1.0, "gamma must be >= 1");
  require(dt > 0.0, "dt must be > 0");
  require(v_max > 0.0, "v_max must be > 0");
  require(mu >= 0.0 && stiffness >= 0.0 && k_rep >= 0.0 && k_p >= 0.0 && k_d >= 0.0 &&
              k_obs >= 0.0,
          "gains must be >= 0");
}

std::vector<Vec2> SwarmSnapshot::positions() const {
  std::vector<Vec2> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.q);
  return out;
}

// ---------------------------------------------------------------------------
// Neighbor index

void NeighborIndex::Grid::build(std::span<const Vec2> pts, double min_cell, bool brute_force) {
  count = pts.size();
  brute = brute_force;
  cell_start.clear();
  ids.clear();
  if (brute || pts.empty()) return;

  Vec2 lo = pts.front();
  Vec2 hi = pts.front();
  for (const auto& q : pts) {
    lo.x = std::min(lo.x, q.x);
    lo.y = std::min(lo.y, q.y);
    hi.x = std::max(hi.x, q.x);
    hi.y = std::max(hi.y, q.y);
  }
  // Widen cells for sparse, far-flung inputs so the table stays O(N).
  cell = min_cell;
  const double max_cells = 4.0 * static_cast<double>(pts.size()) + 1024.0;
  for (;;) {
    const double cx = std::floor((hi.x - lo.x) / cell) + 1.0;
    const double cy = std::floor((hi.y - lo.y) / cell) + 1.0;
    if (cx * cy <= max_cells) {
      nx = static_cast<long>(cx);
      ny = static_cast<long>(cy);
      break;
    }
    cell *= 2.0;
  }
  origin = lo;

  auto cell_of = [&](const Vec2& q) {
    const long ix = std::clamp(static_cast<long>((q.x - origin.x) / cell), 0L, nx - 1);
    const long iy = std::clamp(static_cast<long>((q.y - origin.y) / cell), 0L, ny - 1);
    return static_cast<std::size_t>(iy * nx + ix);
  };

  // Counting sort into CSR; ids within a cell stay ascending.
  cell_start.assign(static_cast<std::size_t>(nx * ny) + 1, 0);
  for (const auto& q : pts) ++cell_start[cell_of(q) + 1];
  for (std::size_t c = 1; c < cell_start.size(); ++c) cell_start[c] += cell_start[c - 1];
  ids.resize(pts.size());
  std::vector<std::size_t> fill(cell_start.begin(), cell_start.end() - 1);
  for (std::size_t k = 0; k < pts.size(); ++k) ids[fill[cell_of(pts[k])]++] = k;
}

void NeighborIndex::Grid::query(const Vec2& q, std::vector<std::size_t>& out) const {
  out.clear();
  if (count == 0) return;
  if (brute) {
    out.resize(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = k;
    return;
  }
  const double fx = std::floor((q.x - origin.x) / cell);
  const double fy = std::floor((q.y - origin.y) / cell);
  if (!std::isfinite(fx) || !std::isfinite(fy)) return;
  if (fx < -1.0 || fy < -1.0 || fx > static_cast<double>(nx) || fy > static_cast<double>(ny)) {
    return;
  }
  const long ix = static_cast<long>(fx);
  const long iy = static_cast<long>(fy);
  for (long cy = std::max(iy - 1, 0L); cy <= std::min(iy + 1, ny - 1); ++cy) {
    for (long cx = std::max(ix - 1, 0L); cx <= std::min(ix + 1, nx - 1); ++cx) {
      const auto c = static_cast<std::size_t>(cy * nx + cx);
      out.insert(out.end(), ids.begin() + static_cast<long>(cell_start[c]),
                 ids.begin() + static_cast<long>(cell_start[c + 1]));
    }
  }
  std::sort(out.begin(), out.end());
}

NeighborIndex::NeighborIndex(std::span<const Vec2> robots, std::span<const Vec2> points,
                             double cell, NeighborMode mode) {
  const bool brute = mode == NeighborMode::brute_force;
  robots_.build(robots, cell, brute);
  points_.build(points, cell, brute);
}

void NeighborIndex::robots_near(const Vec2& q, std::vector<std::size_t>& out) const {
  robots_.query(q, out);
}

void NeighborIndex::points_near(const Vec2& q, std::vector<std::size_t>& out) const {
  points_.query(q, out);
}

NeighborIndex build_neighbor_index(const SwarmSnapshot& snap, std::span<const Vec2> extra_points,
                                   const SphParams& p) {
  const auto robots = snap.positions();
  return NeighborIndex(robots, extra_points, p.support(), p.neighbor_mode);
}

// ---------------------------------------------------------------------------
// Kernel

double kernel_weight(double r, const SphParams& p) {
  const double big_r = r / p.h;
  if (big_r > p.kappa) return 0.0;
  const double alpha = 1.0 / (std::numbers::pi * p.h * p.h);
  return alpha * std::exp(-big_r * big_r * exponent_scale(p));
}

Vec2 kernel_gradient(const Vec2& dq, const SphParams& p) {
  const double r = norm(dq);
  if (r == 0.0) return {};
  const double w = kernel_weight(r, p);
  if (w == 0.0) return {};
  // d/dq exp(-s r^2 / h^2) = -2 s / h^2 * dq * exp(...)
  const double factor = -2.0 * exponent_scale(p) / (p.h * p.h) * w;
  return dq * factor;
}

Vec2 coincident_direction(std::size_t index) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  return unit_from_angle(static_cast<double>(index) * golden);
}

Vec2 repulsion_term(const Vec2& dq, const Vec2& guard, const SphParams& p) {
  Vec2 d = dq;
  double r2 = norm2(d);
  if (r2 < kCoincidentDistance * kCoincidentDistance) {
    d = guard * kCoincidentDistance;
    r2 = kCoincidentDistance * kCoincidentDistance;
  }
  const double w = kernel_weight(std::sqrt(r2), p);
  if (w == 0.0) return {};
  return d * (w / r2);
}

// ---------------------------------------------------------------------------
// Per-robot quantities

double compute_density(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
                       const SphParams& p) {
  auto& nbrs = scratch();
  const Vec2 qi = snap.states[i].q;
  idx.robots_near(qi, nbrs);
  double rho = 0.0;
  for (const std::size_t j : nbrs) {
    rho += p.mass * kernel_weight(norm(qi - snap.states[j].q), p);
  }
  return rho;
}

Tensor2 velocity_gradient(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
                          const SphParams& p) {
  auto& nbrs = scratch();
  const RobotState& si = snap.states[i];
  idx.robots_near(si.q, nbrs);
  Tensor2 g;
  for (const std::size_t j : nbrs) {
    if (j == i) continue;
    const RobotState& sj = snap.states[j];
    const Vec2 grad = kernel_gradient(si.q - sj.q, p);
    if (grad.x == 0.0 && grad.y == 0.0) continue;
    const double vol = p.mass / snap.densities[j];
    const Vec2 dv = sj.v_cmd - si.v_cmd;
    g.xx += vol * dv.x * grad.x;
    g.xy += vol * dv.x * grad.y;
    g.yx += vol * dv.y * grad.x;
    g.yy += vol * dv.y * grad.y;
  }
  return g;
}

double compute_pressure(double rho, const SphParams& p) {
  return p.stiffness * p.rho0 * (std::pow(rho / p.rho0, p.gamma) - 1.0);
}

Tensor2 compute_stress(double pressure, const Tensor2& grad_v, const SphParams& p) {
  const double div = grad_v.xx + grad_v.yy;
  const double shear = p.mu * (grad_v.yx + grad_v.xy);
  Tensor2 s;
  s.xx = -pressure + p.mu * (2.0 * grad_v.xx - (2.0 / 3.0) * div);
  s.yy = -pressure + p.mu * (2.0 * grad_v.yy - (2.0 / 3.0) * div);
  s.xy = shear;
  s.yx = shear;
  return s;
}

Vec2 sph_force(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
               const SphParams& p) {
  auto& nbrs = scratch();
  const Vec2 qi = snap.states[i].q;
  idx.robots_near(qi, nbrs);
  const Tensor2 ti = snap.stresses[i] * (1.0 / (snap.densities[i] * snap.densities[i]));
  Vec2 f;
  for (const std::size_t j : nbrs) {
    if (j == i) continue;
    const Vec2 grad = kernel_gradient(qi - snap.states[j].q, p);
    if (grad.x == 0.0 && grad.y == 0.0) continue;
    const Tensor2 tj = snap.stresses[j] * (1.0 / (snap.densities[j] * snap.densities[j]));
    f += ((ti + tj) * grad) * p.mass;
  }
  return f;
}

Vec2 inter_robot_repulsion(std::size_t i, const SwarmSnapshot& snap, const NeighborIndex& idx,
                           const SphParams& p) {
  if (p.k_rep == 0.0) return {};
  auto& nbrs = scratch();
  const Vec2 qi = snap.states[i].q;
  idx.robots_near(qi, nbrs);
  Vec2 f;
  for (const std::size_t j : nbrs) {
    if (j == i) continue;
    // The lower id owns the guard direction so the pair stays antisymmetric.
    const Vec2 guard = i < j ? coincident_direction(i) : -coincident_direction(j);
    f += repulsion_term(qi - snap.states[j].q, guard, p);
  }
  return f * p.k_rep;
}

Vec2 position_force(const RobotState& state, const Vec2& goal, const SphParams& p) {
  const Vec2 e = goal - state.q;
  return e * p.k_p - state.v_obs * p.k_d;
}

Vec2 integrate_velocity(const Vec2& v, const Vec2& dvdt, const SphParams& p) {
  return clamp_norm(v + dvdt * p.dt, p.v_max);
}

// ---------------------------------------------------------------------------
// Swarm-wide kernels

void compute_caches(SwarmSnapshot& snap, const NeighborIndex& idx, const SphParams& p) {
  const long n = static_cast<long>(snap.size());
  snap.densities.assign(snap.size(), 0.0);
  snap.stresses.assign(snap.size(), Tensor2{});

#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    snap.densities[i] = compute_density(static_cast<std::size_t>(i), snap, idx, p);
  }

#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Tensor2 grad = velocity_gradient(k, snap, idx, p);
    snap.stresses[k] = compute_stress(compute_pressure(snap.densities[k], p), grad, p);
  }
}

std::vector<Vec2> swarm_forces(const SwarmSnapshot& snap, const NeighborIndex& idx,
                               const Vec2& goal, const SphParams& p) {
  const long n = static_cast<long>(snap.size());
  std::vector<Vec2> out(snap.size());

#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = sph_force(k, snap, idx, p) + inter_robot_repulsion(k, snap, idx, p) +
             position_force(snap.states[k], goal, p);
  }
  return out;
}

}  // namespace swarm
