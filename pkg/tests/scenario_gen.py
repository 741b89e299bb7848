"""Seeded random scenarios for property and acceptance tests."""

from __future__ import annotations

import math
import random

from tetherpair.geom import Polygon, Point, in_free_space, visible
from tetherpair.scenario import Scenario, validate
from tetherpair.visgraph import build_rvg, shortest_dists_from


def _convex_blob(rng: random.Random, cx: float, cy: float, r: float, k: int) -> Polygon:
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(k))
    pts = [(round(cx + r * math.cos(a), 2), round(cy + r * math.sin(a), 2)) for a in angles]
    return Polygon.from_coords(pts).ccw()


def random_scenario(seed: int, max_obstacles: int = 3, max_vertices: int = 12,
                    size: float = 8.0) -> Scenario:
    """Valid, feasible scenario with a straight initial cable."""
    rng = random.Random(seed)
    while True:
        obstacles: list[Polygon] = []
        budget = max_vertices
        centers = []
        for _ in range(rng.randint(1, max_obstacles)):
            k = rng.randint(3, min(5, budget)) if budget >= 3 else 0
            if k < 3:
                break
            r = rng.uniform(0.6, 1.4)
            for _ in range(50):
                cx, cy = rng.uniform(r, size - r), rng.uniform(r, size - r)
                if all(math.hypot(cx - x, cy - y) > r + rr + 0.3 for x, y, rr in centers):
                    break
            else:
                continue
            poly = _convex_blob(rng, cx, cy, r, k)
            if abs(poly.area) < 0.2 or poly.problems():
                continue
            centers.append((cx, cy, r))
            obstacles.append(poly)
            budget -= k
        if not obstacles:
            continue

        def free_point():
            while True:
                p = Point(round(rng.uniform(0, size), 2), round(rng.uniform(0, size), 2))
                if in_free_space(p, obstacles):
                    return p

        ra = free_point()
        for _ in range(100):
            rb = free_point()
            if 0.5 < math.dist(ra, rb) < 4 and visible(ra, rb, obstacles):
                break
        else:
            continue
        da, db = free_point(), free_point()
        probe = Scenario(tuple(obstacles), ra, rb, da, db, 100.0, (ra, rb))
        g = build_rvg(probe)
        sep = shortest_dists_from(g, g.terminals["d_a"])[g.terminals["d_b"]]
        ell = round(max(sep, math.dist(ra, rb)) * rng.uniform(1.05, 1.6) + 0.1, 2)
        s = Scenario(tuple(obstacles), ra, rb, da, db, ell, (ra, rb), name=f"random-{seed}")
        if not validate(s):
            return s
