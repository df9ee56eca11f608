#!/usr/bin/env python3
"""Writes the bundled .scn files. Re-run after editing a geometry below."""
import math
from pathlib import Path

HERE = Path(__file__).resolve().parent

SIM = dict(width=0.9, height=0.9, start=(0.05, 0.35, 0.2), goal=(0.7, 0.45))
REAL = dict(width=0.8, height=0.6, start=(0.04, 0.2, 0.2), goal=(0.66, 0.3))


def fmt(v):
    return repr(round(v, 6))


def arc_band(cx, cy, r_in, r_out, a0, a1, segs):
    """Annular sector, counter-clockwise. Angles in degrees."""
    outer = [(cx + r_out * math.cos(math.radians(a0 + (a1 - a0) * k / segs)),
              cy + r_out * math.sin(math.radians(a0 + (a1 - a0) * k / segs)))
             for k in range(segs + 1)]
    inner = [(cx + r_in * math.cos(math.radians(a1 - (a1 - a0) * k / segs)),
              cy + r_in * math.sin(math.radians(a1 - (a1 - a0) * k / segs)))
             for k in range(segs + 1)]
    return outer + inner


def rect(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def ngon(cx, cy, r, n=12):
    return [(cx + r * math.cos(2 * math.pi * k / n), cy + r * math.sin(2 * math.pi * k / n))
            for k in range(n)]


def write(name, field, obstacles, notes, n_robots=8, radius=0.0325, out=None):
    lines = [f"# {name}: generated by generate.py, do not edit by hand"]
    lines += [f"# {n}" for n in notes]
    lines += ["version 1", f"name {name}",
              f"bounds {fmt(field['width'])} {fmt(field['height'])}",
              "start_region " + " ".join(fmt(v) for v in field["start"]),
              "goal " + " ".join(fmt(v) for v in field["goal"]),
              f"n_robots {n_robots}", f"robot_radius {fmt(radius)}", "rng_seed 0"]
    for oname, verts in obstacles:
        lines.append(f"obstacle {oname}")
        lines += [f"  {fmt(x)} {fmt(y)}" for x, y in verts]
        lines.append("end")
    ((out or HERE) / f"{name}.scn").write_text("\n".join(lines) + "\n")


def entry(field, tag="", s_rs=0.307, s_hw=0.129, s_dy=0.047, s_dx=-0.075,
          c_rs=0.556, c_hw=0.071, c_dy=0.165, c_dx=0.134, t=0.03, out=None):
    # offsets are measured from the midpoint between start square and goal
    gx, gy = field["goal"]
    sx = field["start"][0] + field["start"][2]
    xm = (sx + gx) / 2
    a = math.degrees(math.asin(s_hw / s_rs))
    cx = xm + s_dx + s_rs * math.cos(math.radians(a)) - t
    shield = arc_band(cx, gy + s_dy, s_rs, s_rs + t, 180 - a, 180 + a, 16)
    b = math.degrees(math.asin(c_hw / c_rs))
    cx = xm + c_dx - c_rs * math.cos(math.radians(b))
    hollow = arc_band(cx, gy + c_dy, c_rs, c_rs + t, -b, b, 16)
    write("entry" + tag, field, [("bulging_wall", shield), ("hollow_wall", hollow)],
          [f"a curved wall bulging toward the start (radius {s_rs} m, chord {2 * s_hw} m)",
           f"and a curved wall hollow toward the start (radius {c_rs} m, chord {2 * c_hw} m)"],
          out=out)


def dense_pillar(field, tag="", out=None):
    gx, gy = field["goal"]
    sx = field["start"][0] + field["start"][2]
    pr = 0.035
    obs = []
    # staggered columns of round pillars; gaps inside a column are 0.07 m,
    # barely wider than a robot, so a slightly misaligned robot wedges in
    cols = [(sx + 0.10, [-0.21, -0.07, 0.07, 0.21]),
            (sx + 0.22, [-0.14, 0.0, 0.14]),
            (sx + 0.34, [-0.21, -0.07, 0.07, 0.21])]
    for ci, (x, offs) in enumerate(cols):
        for k, dy in enumerate(offs):
            obs.append((f"pillar_{ci}_{k}", ngon(x, gy + dy, pr)))
    write("dense_pillar" + tag, field, obs,
          [f"{len(obs)} twelve-sided pillars of radius {pr} m in three staggered columns",
           "column x offsets 0.10/0.22/0.34 m past the start square, pitch 0.14 m"], out=out)


def barricade(field, tag="", half=0.12, bend=0.04, out=None):
    gx, gy = field["goal"]
    x = (field["start"][0] + field["start"][2] + gx) / 2
    t = 0.03
    # a shallow chevron: the middle sits on the start-goal line, both tips are
    # pulled back toward the start by `bend`
    wall = [(x - bend + t / 2, gy - half), (x + t / 2, gy), (x - bend + t / 2, gy + half),
            (x - bend - t / 2, gy + half), (x - t / 2, gy), (x - bend - t / 2, gy - half)]
    write("barricade" + tag, field, [("wall", wall)],
          [f"one wall {t} m thick spanning {2 * half} m across the start-goal line at",
           f"x = {fmt(x)}, its two ends bent {bend} m back toward the start"], out=out)


def pocket_maze(field, tag="", depth=0.21, half_w=0.11, back_gap=0.2, out=None):
    gx, gy = field["goal"]
    x_back = gx - back_gap
    t = 0.03
    x_mouth = x_back - depth
    # U opening toward the start; the goal sits behind the closed end
    u = [(x_back, gy - half_w - t), (x_back + t, gy - half_w - t),
         (x_back + t, gy + half_w + t), (x_back, gy + half_w + t),
         (x_mouth, gy + half_w + t), (x_mouth, gy + half_w),
         (x_back, gy + half_w), (x_back, gy - half_w),
         (x_mouth, gy - half_w), (x_mouth, gy - half_w - t)]
    write("pocket_maze" + tag, field, [("pocket", u)],
          [f"U-shaped pocket open toward the start: inner depth {depth} m,",
           f"inner width {2 * half_w} m, wall thickness {t} m, closed end at x = {fmt(x_back)}"], out=out)


def open_field(field, tag="", out=None):
    write("open" + tag, field, [], ["no obstacles"], out=out)


if __name__ == "__main__":
    open_field(SIM)
    entry(SIM)
    dense_pillar(SIM)
    barricade(SIM)
    pocket_maze(SIM)
    # same builders on the smaller tabletop field; geometry only, not tuned
    for build in (open_field, entry, dense_pillar, barricade, pocket_maze):
        build(REAL, tag="_real")
