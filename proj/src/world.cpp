#include "swarm/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "swarm/sph.hpp"

namespace swarm {

namespace {

constexpr int kMaxSlideIterations = 8;
constexpr int kMaxSeparationIterations = 16;
constexpr double kTouch = 1e-12;

struct Hit {
  double t = INFINITY;
  Vec2 normal;
  Vec2 point;
};

// Static geometry: obstacle edges plus the four boundary half-planes.
class Walls {
 public:
  Walls(const Scenario& sc, double radius) : w_(sc.width), h_(sc.height), r_(radius) {
    for (const auto& poly : sc.obstacles) {
      const auto& v = poly.vertices;
      for (std::size_t i = 0; i < v.size(); ++i) edges_.push_back({v[i], v[(i + 1) % v.size()]});
    }
  }

  // Earliest time in [0, 1] at which a disk moving from p by d touches a wall
  // while approaching it.
  Hit earliest(const Vec2& p, const Vec2& d) const {
    Hit best;
    for (const auto& [a, b] : edges_) {
      side(p, d, a, b, best);
      corner(p, d, a, best);
    }
    bound(p.x - r_, -d.x, {1.0, 0.0}, {0.0, p.y}, best);
    bound(w_ - r_ - p.x, d.x, {-1.0, 0.0}, {w_, p.y}, best);
    bound(p.y - r_, -d.y, {0.0, 1.0}, {p.x, 0.0}, best);
    bound(h_ - r_ - p.y, d.y, {0.0, -1.0}, {p.x, h_}, best);
    return best;
  }

  // Pushes p out of any wall it overlaps.
  Vec2 depenetrate(Vec2 p) const {
    for (int pass = 0; pass < 4; ++pass) {
      bool moved = false;
      for (const auto& [a, b] : edges_) {
        const Vec2 c = closest_on_segment(p, a, b);
        const double dist = norm(p - c);
        if (dist < r_ && dist > 0.0) {
          p = c + (p - c) * (r_ / dist);
          moved = true;
        }
      }
      p.x = std::clamp(p.x, r_, w_ - r_);
      p.y = std::clamp(p.y, r_, h_ - r_);
      if (!moved) break;
    }
    return p;
  }

  double penetration(const Vec2& p, const std::vector<Polygon>& polys) const {
    double worst = 0.0;
    for (const auto& poly : polys) {
      const double dist = point_in_polygon(p, poly.vertices) ? -1.0 : distance_to_polygon(p, poly.vertices);
      worst = std::max(worst, r_ - dist);
    }
    worst = std::max({worst, r_ - p.x, p.x - (w_ - r_), r_ - p.y, p.y - (h_ - r_)});
    return worst;
  }

 private:
  void side(const Vec2& p, const Vec2& d, const Vec2& a, const Vec2& b, Hit& best) const {
    const Vec2 e = b - a;
    const double len = norm(e);
    if (len == 0.0) return;
    const Vec2 u = e / len;
    Vec2 n = perp(u);
    double s0 = dot(p - a, n);
    if (s0 < 0.0) {
      n = -n;
      s0 = -s0;
    }
    const double dn = dot(d, n);
    if (!(dn < 0.0)) return;
    double t = (s0 - r_) / -dn;
    if (s0 - r_ <= kTouch) t = 0.0;
    if (t > 1.0 || t >= best.t) return;
    const Vec2 hit = p + d * t;
    const double along = dot(hit - a, u);
    if (along < 0.0 || along > len) return;
    best = {t, n, a + u * along};
  }

  void corner(const Vec2& p, const Vec2& d, const Vec2& c, Hit& best) const {
    const Vec2 f = p - c;
    const double bq = dot(f, d);
    if (!(bq < 0.0)) return;
    const double cq = norm2(f) - r_ * r_;
    const double aq = norm2(d);
    double t = 0.0;
    if (cq > kTouch * r_) {
      const double disc = bq * bq - aq * cq;
      if (disc < 0.0) return;
      t = (-bq - std::sqrt(disc)) / aq;
    }
    if (t > 1.0 || t >= best.t) return;
    const Vec2 hit = p + d * t;
    const Vec2 rel = hit - c;
    const double rn = norm(rel);
    if (rn == 0.0) return;
    best = {t, rel / rn, c};
  }

  void bound(double gap, double approach, const Vec2& normal, const Vec2& point, Hit& best) const {
    if (!(approach > 0.0)) return;
    double t = gap / approach;
    if (gap <= kTouch) t = 0.0;
    if (t > 1.0 || t >= best.t) return;
    best = {t, normal, point};
  }

  double w_;
  double h_;
  double r_;
  std::vector<std::pair<Vec2, Vec2>> edges_;
};

// Moves one disk by `delta`, clipped by walls; slides along contacts unless
// `mode` is stick.
Vec2 move_disk(const Walls& walls, std::size_t robot, const Vec2& from, const Vec2& delta,
               ContactMode mode, double radius, std::vector<ContactReport>& contacts) {
  Vec2 pos = from;
  Vec2 rem = delta;
  for (int it = 0; it < kMaxSlideIterations; ++it) {
    if (rem.x == 0.0 && rem.y == 0.0) break;
    const Hit hit = walls.earliest(pos, rem);
    if (!std::isfinite(hit.t)) {
      pos += rem;
      rem = {};
      break;
    }
    pos += rem * hit.t;
    contacts.push_back({robot, ContactKind::wall, hit.normal, pos - hit.normal * radius});
    if (mode == ContactMode::stick) {
      rem = {};
      break;
    }
    rem = rem * (1.0 - hit.t);
    const double into = dot(rem, hit.normal);
    if (into < 0.0) rem -= hit.normal * into;
  }
  return walls.depenetrate(pos);
}

std::uint64_t next_u64(std::mt19937_64& rng) { return rng(); }

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(next_u64(rng) >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<Pose> spawn_swarm(const Scenario& sc, std::uint64_t seed, const VehicleParams& vp) {
  std::mt19937_64 rng(seed);
  const double radius = sc.robot_radius;
  const Walls walls(sc, radius);
  std::vector<Vec2> centers;
  std::vector<Pose> poses;
  // Sequential sampling can jam a tight square; a stuck robot restarts the
  // whole layout from the current generator state.
  constexpr int kMaxRejections = 10000;
  constexpr int kMaxRestarts = 100;
  for (int restart = 0; centers.size() < sc.n_robots;) {
    int rejections = 0;
    for (;;) {
      const Vec2 c{sc.start_min.x + sc.start_size * uniform01(rng),
                   sc.start_min.y + sc.start_size * uniform01(rng)};
      const double theta = std::numbers::pi - 2.0 * std::numbers::pi * uniform01(rng);
      bool ok = walls.penetration(c, sc.obstacles) <= 0.0;
      for (const auto& other : centers) {
        if (!ok) break;
        ok = norm(c - other) > 2.0 * radius;
      }
      if (ok) {
        centers.push_back(c);
        poses.push_back(pose_from_center(c, theta, vp));
        break;
      }
      if (++rejections >= kMaxRejections) {
        if (++restart >= kMaxRestarts) {
          throw PlacementError("scenario '" + sc.name + "': could not place " +
                               std::to_string(sc.n_robots) + " robots after " +
                               std::to_string(kMaxRestarts) + " attempts at a layout");
        }
        centers.clear();
        poses.clear();
        break;
      }
    }
  }
  return poses;
}

ContactResult resolve_contacts(std::span<const Vec2> proposed, std::span<const Vec2> current,
                               const Scenario& sc, double radius, ContactMode mode) {
  const Walls walls(sc, radius);
  const std::size_t n = proposed.size();
  ContactResult res;
  res.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    res.positions[i] = move_disk(walls, i, current[i], proposed[i] - current[i], mode, radius,
                                 res.contacts);
  }

  const double diameter = 2.0 * radius;
  auto& pos = res.positions;
  std::vector<std::pair<std::size_t, std::size_t>> touched;
  bool overlapping = true;
  for (int it = 0; it < kMaxSeparationIterations && overlapping; ++it) {
    overlapping = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec2 dq = pos[j] - pos[i];
        const double dist = norm(dq);
        if (dist >= diameter - kTouch) continue;
        overlapping = true;
        const Vec2 nrm = dist > 0.0 ? dq / dist : coincident_direction(i);
        const double overlap = diameter - dist;
        // Each disk takes half; a disk blocked by a wall hands the rest over.
        std::vector<ContactReport> ignored;
        const Vec2 pi0 = pos[i];
        pos[i] = move_disk(walls, i, pos[i], nrm * (-0.5 * overlap), mode, radius, ignored);
        const double got_i = dot(pi0 - pos[i], nrm);
        const Vec2 pj0 = pos[j];
        pos[j] = move_disk(walls, j, pos[j], nrm * (overlap - got_i), mode, radius, ignored);
        const double got_j = dot(pos[j] - pj0, nrm);
        const double left = overlap - got_i - got_j;
        if (left > kTouch) {
          pos[i] = move_disk(walls, i, pos[i], nrm * -left, mode, radius, ignored);
        }
        touched.emplace_back(i, j);
      }
    }
  }

  if (overlapping) {
    // Did not settle: fall back to the last feasible positions for every
    // disk still involved in an overlap.
    bool any = true;
    while (any) {
      any = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (norm(pos[j] - pos[i]) >= diameter - kPenetrationTolerance) continue;
          for (const std::size_t k : {i, j}) {
            if (!(pos[k] == current[k])) {
              pos[k] = current[k];
              any = true;
            }
          }
        }
      }
    }
    res.converged = false;
  }

  // One report per touching pair, taken at the settled positions.
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (const auto& [i, j] : touched) {
    const Vec2 dq = pos[j] - pos[i];
    const double dist = norm(dq);
    const Vec2 nrm = dist > 0.0 ? dq / dist : coincident_direction(i);
    res.contacts.push_back({i, ContactKind::robot, -nrm, pos[i] + nrm * radius});
    res.contacts.push_back({j, ContactKind::robot, nrm, pos[j] - nrm * radius});
  }
  return res;
}

double max_penetration(std::span<const Vec2> centers, const Scenario& sc, double radius) {
  const Walls walls(sc, radius);
  double worst = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    worst = std::max(worst, walls.penetration(centers[i], sc.obstacles));
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      worst = std::max(worst, 2.0 * radius - norm(centers[i] - centers[j]));
    }
  }
  return worst;
}

std::vector<Vec2> effective_centers(const WorldState& w, const VehicleParams& vp) {
  std::vector<Vec2> out;
  out.reserve(w.poses.size());
  for (const auto& p : w.poses) out.push_back(effective_center(p, vp));
  return out;
}

WorldState world_step(const WorldState& w, std::span<const UnicycleCmd> cmds, const Scenario& sc,
                      const VehicleParams& vp, double dt, ContactMode mode) {
  const std::size_t n = w.poses.size();
  std::vector<Pose> moved(n);
  std::vector<Vec2> current(n);
  std::vector<Vec2> proposed(n);
  for (std::size_t i = 0; i < n; ++i) {
    current[i] = effective_center(w.poses[i], vp);
    moved[i] = step_unicycle(w.poses[i], cmds[i], dt);
    proposed[i] = effective_center(moved[i], vp);
  }
  ContactResult res = resolve_contacts(proposed, current, sc, vp.radius(), mode);

  WorldState next;
  next.poses.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Heading always follows omega; only the translation is constrained.
    next.poses[i] = res.positions[i] == proposed[i]
                        ? moved[i]
                        : pose_from_center(res.positions[i], moved[i].theta, vp);
  }
  next.step = w.step + 1;
  next.sim_time = static_cast<double>(next.step) * dt;
  next.contacts = std::move(res.contacts);
  next.converged = res.converged;
  return next;
}

bool goal_reached(std::span<const Vec2> centers, const Scenario& sc, std::span<const Vec2> v_obs) {
  for (const auto& c : centers) {
    if (norm(c - sc.goal) > kArrivalRadius) return false;
  }
  for (const auto& v : v_obs) {
    if (norm(v) > kArrivalSpeed) return false;
  }
  return true;
}

}  // namespace swarm
