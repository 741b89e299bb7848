"""Constrained triangulation of a bounding box with the obstacles as holes.

The triangulation is built greedily: every obstacle edge and box edge is
forced, then the remaining free-space diagonals are inserted shortest first
whenever they cross nothing already present. A maximal non-crossing edge set
inside a polygonal domain is a triangulation of that domain, which is all the
sleeve/funnel machinery needs (Delaunay quality is irrelevant here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import EPS, Point, cross, dist, in_free_space, point_segment_distance, segments_intersect, visible


@dataclass
class Triangulation:
    points: list[Point]
    # obstacle (k, i) for obstacle vertices, None for box corners
    owner: list
    triangles: list[tuple[int, int, int]]
    # undirected edge -> triangles sharing it
    edge_tris: dict

    @property
    def n_box(self) -> int:
        return 4

    def neighbor(self, t: int, u: int, w: int) -> int | None:
        for s in self.edge_tris.get((min(u, w), max(u, w)), ()):
            if s != t:
                return s
        return None

    def contains(self, t: int, p, eps: float = 1e-12) -> bool:
        i, j, k = self.triangles[t]
        a, b, c = self.points[i], self.points[j], self.points[k]
        scale = eps * max(1.0, dist(a, b), dist(b, c), dist(c, a)) ** 2
        return cross(a, b, p) >= -scale and cross(b, c, p) >= -scale and cross(c, a, p) >= -scale

    def locate(self, p) -> int | None:
        best, best_val = None, -math.inf
        for t, (i, j, k) in enumerate(self.triangles):
            a, b, c = self.points[i], self.points[j], self.points[k]
            m = min(cross(a, b, p), cross(b, c, p), cross(c, a, p))
            if m >= 0:
                return t
            if m > best_val:
                best, best_val = t, m
        # p sits on an edge up to round-off
        if best is not None and self.contains(best, p, 1e-9):
            return best
        return None


def triangulate(obstacles, box: tuple[float, float, float, float]) -> Triangulation:
    x0, y0, x1, y1 = box
    pts = [Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)]
    owner: list = [None, None, None, None]
    forced = [(0, 1), (1, 2), (2, 3), (3, 0)]
    for k, poly in enumerate(obstacles):
        base = len(pts)
        n = len(poly)
        for i, v in enumerate(poly.vertices):
            pts.append(v)
            owner.append((k, i))
            forced.append((base + i, base + (i + 1) % n))
    n = len(pts)

    def clear(i: int, j: int) -> bool:
        a, b = pts[i], pts[j]
        for m in range(n):
            if m != i and m != j and point_segment_distance(pts[m], a, b) <= EPS:
                return False
        return visible(a, b, obstacles)

    edges: list[tuple[int, int]] = [(min(i, j), max(i, j)) for i, j in forced]
    present = set(edges)
    cand = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in present:
                cand.append((dist(pts[i], pts[j]), i, j))
    cand.sort()
    for _, i, j in cand:
        seg = (pts[i], pts[j])
        if any(segments_intersect(seg, (pts[u], pts[w]), "proper") for u, w in edges):
            continue
        if not clear(i, j):
            continue
        edges.append((i, j))
        present.add((i, j))

    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    tris = set()
    for i in range(n):
        nb = sorted(adj[i], key=lambda j: math.atan2(pts[j].y - pts[i].y, pts[j].x - pts[i].x))
        for a in range(len(nb)):
            j, k = nb[a], nb[(a + 1) % len(nb)]
            if j == k or (min(j, k), max(j, k)) not in present:
                continue
            if cross(pts[i], pts[j], pts[k]) <= 0:
                continue
            c = Point((pts[i].x + pts[j].x + pts[k].x) / 3, (pts[i].y + pts[j].y + pts[k].y) / 3)
            if not in_free_space(c, obstacles):
                continue
            tri = _canonical(i, j, k)
            if any(m not in tri and _strictly_inside(pts[m], pts[i], pts[j], pts[k]) for m in range(n)):
                continue
            tris.add(tri)
    triangles = sorted(tris)
    edge_tris: dict = {}
    for t, (i, j, k) in enumerate(triangles):
        for u, w in ((i, j), (j, k), (k, i)):
            edge_tris.setdefault((min(u, w), max(u, w)), []).append(t)
    return Triangulation(pts, owner, triangles, edge_tris)


def _canonical(i: int, j: int, k: int) -> tuple[int, int, int]:
    # rotate so the smallest index leads, keeping CCW order
    m = min(i, j, k)
    if m == i:
        return (i, j, k)
    if m == j:
        return (j, k, i)
    return (k, i, j)


def _strictly_inside(p, a, b, c) -> bool:
    return cross(a, b, p) > EPS and cross(b, c, p) > EPS and cross(c, a, p) > EPS

