#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "swarm/world.hpp"

namespace swarm {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ScenarioParseError(line, "expected a number, got '" + tok + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& tok, int line) {
  std::uint64_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ScenarioParseError(line, "expected a non-negative integer, got '" + tok + "'");
  }
  return v;
}

void expect_args(const std::vector<std::string>& toks, std::size_t n, int line) {
  if (toks.size() != n + 1) {
    throw ScenarioParseError(line, "'" + toks[0] + "' takes " + std::to_string(n) +
                                       " value(s), got " + std::to_string(toks.size() - 1));
  }
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool square_overlaps_polygon(const Vec2& lo, double size, std::span<const Vec2> poly) {
  const Vec2 sq[4] = {lo, {lo.x + size, lo.y}, {lo.x + size, lo.y + size}, {lo.x, lo.y + size}};
  for (const auto& v : poly) {
    if (v.x > lo.x && v.x < lo.x + size && v.y > lo.y && v.y < lo.y + size) return true;
  }
  for (const auto& c : sq) {
    if (point_in_polygon(c, poly)) return true;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    for (int k = 0; k < 4; ++k) {
      if (segments_intersect(a, b, sq[k], sq[(k + 1) % 4])) return true;
    }
  }
  return false;
}

}  // namespace

double signed_area(std::span<const Vec2> polygon) {
  double a = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    a += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * a;
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> polygon) {
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

Vec2 closest_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = norm2(ab);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

double distance_to_polygon(const Vec2& p, std::span<const Vec2> polygon) {
  if (point_in_polygon(p, polygon)) return 0.0;
  double best = INFINITY;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 c = closest_on_segment(p, polygon[i], polygon[(i + 1) % polygon.size()]);
    best = std::min(best, norm(p - c));
  }
  return best;
}

void Scenario::validate() const {
  auto fail = [&](const std::string& rule) {
    throw ScenarioValidationError("scenario '" + name + "': " + rule);
  };
  if (name.empty()) fail("name must be non-empty");
  if (!(width > 0.0 && height > 0.0)) fail("bounds must be positive");
  if (n_robots < 1) fail("n_robots must be >= 1");
  if (!(robot_radius > 0.0)) fail("robot_radius must be > 0");
  auto inside_bounds = [&](const Vec2& v) {
    return v.x >= 0.0 && v.x <= width && v.y >= 0.0 && v.y <= height;
  };
  for (const auto& poly : obstacles) {
    if (poly.vertices.size() < 3) fail("obstacle '" + poly.name + "' needs at least 3 vertices");
    for (const auto& v : poly.vertices) {
      if (!inside_bounds(v)) fail("obstacle '" + poly.name + "' has a vertex outside the bounds");
    }
    if (!(signed_area(poly.vertices) > 0.0)) {
      fail("obstacle '" + poly.name + "' must be counter-clockwise with non-zero area");
    }
  }
  if (!(start_size > 0.0)) fail("start_region size must be > 0");
  if (!inside_bounds(start_min) ||
      !inside_bounds({start_min.x + start_size, start_min.y + start_size})) {
    fail("start_region must lie inside the bounds");
  }
  if (!inside_bounds(goal)) fail("goal must lie inside the bounds");
  for (const auto& poly : obstacles) {
    if (point_in_polygon(goal, poly.vertices)) fail("goal lies inside obstacle '" + poly.name + "'");
    if (square_overlaps_polygon(start_min, start_size, poly.vertices)) {
      fail("start_region overlaps obstacle '" + poly.name + "'");
    }
  }
  // Square-lattice capacity with centers anywhere in the closed region.
  const double per_side = std::floor(start_size / (2.0 * robot_radius)) + 1.0;
  if (per_side * per_side < static_cast<double>(n_robots)) {
    fail("start_region too small for n_robots without overlap");
  }
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool have_version = false;
  bool have_start = false;
  bool have_goal = false;
  Polygon* open = nullptr;
  int open_line = 0;

  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const auto toks = split(raw);
    if (toks.empty()) continue;
    const std::string& key = toks[0];

    if (open != nullptr) {
      if (key == "end") {
        expect_args(toks, 0, line);
        open = nullptr;
        continue;
      }
      if (toks.size() != 2) throw ScenarioParseError(line, "expected vertex 'x y' or 'end'");
      open->vertices.push_back({parse_double(toks[0], line), parse_double(toks[1], line)});
      continue;
    }

    if (key == "version") {
      expect_args(toks, 1, line);
      if (parse_uint(toks[1], line) != 1) {
        throw ScenarioParseError(line, "unsupported version '" + toks[1] + "'");
      }
      have_version = true;
    } else if (key == "name") {
      expect_args(toks, 1, line);
      sc.name = toks[1];
    } else if (key == "bounds") {
      expect_args(toks, 2, line);
      sc.width = parse_double(toks[1], line);
      sc.height = parse_double(toks[2], line);
    } else if (key == "start_region") {
      expect_args(toks, 3, line);
      sc.start_min = {parse_double(toks[1], line), parse_double(toks[2], line)};
      sc.start_size = parse_double(toks[3], line);
      have_start = true;
    } else if (key == "goal") {
      expect_args(toks, 2, line);
      sc.goal = {parse_double(toks[1], line), parse_double(toks[2], line)};
      have_goal = true;
    } else if (key == "n_robots") {
      expect_args(toks, 1, line);
      sc.n_robots = static_cast<std::size_t>(parse_uint(toks[1], line));
    } else if (key == "robot_radius") {
      expect_args(toks, 1, line);
      sc.robot_radius = parse_double(toks[1], line);
    } else if (key == "rng_seed") {
      expect_args(toks, 1, line);
      sc.rng_seed = parse_uint(toks[1], line);
    } else if (key == "obstacle") {
      expect_args(toks, 1, line);
      sc.obstacles.push_back({toks[1], {}});
      open = &sc.obstacles.back();
      open_line = line;
    } else {
      throw ScenarioParseError(line, "unknown key '" + key + "'");
    }
  }
  if (open != nullptr) throw ScenarioParseError(open_line, "obstacle block is missing 'end'");
  if (!have_version) throw ScenarioParseError(line, "missing 'version'");
  if (!have_start) throw ScenarioParseError(line, "missing 'start_region'");
  if (!have_goal) throw ScenarioParseError(line, "missing 'goal'");
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioParseError& e) {
    throw ScenarioParseError(e.line(), path.string() + ": " + e.what());
  }
}

std::string to_text(const Scenario& sc) {
  std::ostringstream out;
  out << "version 1\n";
  out << "name " << sc.name << "\n";
  out << "bounds " << fmt_double(sc.width) << " " << fmt_double(sc.height) << "\n";
  out << "start_region " << fmt_double(sc.start_min.x) << " " << fmt_double(sc.start_min.y) << " "
      << fmt_double(sc.start_size) << "\n";
  out << "goal " << fmt_double(sc.goal.x) << " " << fmt_double(sc.goal.y) << "\n";
  out << "n_robots " << sc.n_robots << "\n";
  out << "robot_radius " << fmt_double(sc.robot_radius) << "\n";
  out << "rng_seed " << sc.rng_seed << "\n";
  for (const auto& poly : sc.obstacles) {
    out << "obstacle " << poly.name << "\n";
    for (const auto& v : poly.vertices) out << "  " << fmt_double(v.x) << " " << fmt_double(v.y) << "\n";
    out << "end\n";
  }
  return out.str();
}

std::uint64_t content_hash(const Scenario& sc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : to_text(sc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace swarm
