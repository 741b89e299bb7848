"""Taut cables: tightening, cable updates under robot moves, consumption.

Tightening traces the input polyline through a constrained triangulation of
free space, reduces the crossed-triangle sequence (cancelling immediate
back-tracks) to get the sleeve of its homotopy class, and pulls the string
through the sleeve with the funnel algorithm.

Polyline points that sit on obstacle boundaries, and segments that graze
obstacle vertices, are first nudged a distance ``NUDGE`` into the free-space
wedge of the touched vertex. The nudge is homotopy preserving and puts the
trace in general position; nudged endpoints are restored afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .geom import (
    EPS,
    Point,
    Polygon,
    bisector_into_free,
    cross,
    dedupe,
    dist,
    point_segment_distance,
    polyline_length,
    same_point,
    visible,
)
from .triangulation import Triangulation, triangulate

NUDGE = 1e-6


class InputNotInFreeSpace(ValueError):
    pass


class NotVisible(ValueError):
    pass


@dataclass(frozen=True)
class TautCable:
    """Shortest cable in its homotopy class; ends are the robot positions."""

    verts: tuple[Point, ...]
    length: float

    @classmethod
    def of(cls, verts) -> "TautCable":
        verts = tuple(Point(float(p[0]), float(p[1])) for p in verts)
        return cls(verts, polyline_length(verts))

    @property
    def first(self) -> Point:
        return self.verts[0]

    @property
    def last(self) -> Point:
        return self.verts[-1]

    def __len__(self) -> int:
        return len(self.verts)


class Tightener:
    """Tightening operator bound to one obstacle set and bounding box."""

    def __init__(self, obstacles: Sequence[Polygon], box: tuple[float, float, float, float]):
        self.obstacles = tuple(o.ccw() for o in obstacles)
        self.box = box
        self.tri: Triangulation = triangulate(self.obstacles, box)
        self._vertex_at: dict[tuple[float, float], tuple[int, int]] = {}
        for k, poly in enumerate(self.obstacles):
            for i, v in enumerate(poly.vertices):
                self._vertex_at[(v.x, v.y)] = (k, i)
        self._bisectors = {
            (k, i): bisector_into_free(poly, i)
            for k, poly in enumerate(self.obstacles)
            for i in range(len(poly))
        }
        xs = [v.x for o in self.obstacles for v in o.vertices]
        ys = [v.y for o in self.obstacles for v in o.vertices]
        self._obb = (min(xs), min(ys), max(xs), max(ys)) if xs else None
        # planner queries reuse the same vertex-to-vertex segments constantly
        self._nudge_memo: dict = {}
        self._graze_memo: dict = {}
        self._walk_memo: dict = {}
        self._portal_memo: dict = {}
        self._locate_memo: dict = {}

    @classmethod
    def for_points(cls, obstacles, points, margin: float) -> "Tightener":
        pts = list(points) + [v for o in obstacles for v in o.vertices]
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        margin = max(margin, 1.0)
        return cls(obstacles, (min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin))

    @classmethod
    def for_scenario(cls, s) -> "Tightener":
        return cls.for_points(s.obstacles, s.points(), 2.0 * s.ell)

    def covers(self, points) -> bool:
        x0, y0, x1, y1 = self.box
        return all(x0 < p[0] < x1 and y0 < p[1] < y1 for p in points)

    # -- boundary handling -------------------------------------------------

    def _vertex_of(self, p) -> tuple[int, int] | None:
        hit = self._vertex_at.get((p[0], p[1]))
        if hit is not None:
            return hit
        if self._obb is None or not self._near_obstacles(p):
            return None
        for k, poly in enumerate(self.obstacles):
            for i, v in enumerate(poly.vertices):
                if same_point(v, p):
                    return (k, i)
        return None

    def _near_obstacles(self, p) -> bool:
        x0, y0, x1, y1 = self._obb
        return x0 - EPS <= p[0] <= x1 + EPS and y0 - EPS <= p[1] <= y1 + EPS

    def _nudged(self, p) -> Point:
        hit = self._vertex_of(p)
        if hit is not None:
            v = self.obstacles[hit[0]].vertices[hit[1]]
            bx, by = self._bisectors[hit]
            return Point(v.x + NUDGE * bx, v.y + NUDGE * by)
        if self._obb is not None and self._near_obstacles(p):
            for poly in self.obstacles:
                for a, b in poly.edges():
                    if point_segment_distance(p, a, b) <= EPS:
                        # CCW polygon: the interior is left of a->b
                        ex, ey = b.x - a.x, b.y - a.y
                        n = math.hypot(ex, ey)
                        return Point(p[0] + NUDGE * ey / n, p[1] - NUDGE * ex / n)
        return Point(p[0], p[1])

    def _grazed(self, a, b) -> list[Point]:
        """Nudged copies of obstacle vertices lying inside the open segment ab."""
        if self._obb is None:
            return []
        x0, y0, x1, y1 = self._obb
        if (max(a[0], b[0]) < x0 - EPS or min(a[0], b[0]) > x1 + EPS
                or max(a[1], b[1]) < y0 - EPS or min(a[1], b[1]) > y1 + EPS):
            return []
        dx, dy = b[0] - a[0], b[1] - a[1]
        den = dx * dx + dy * dy
        if den == 0.0:
            return []
        hits = []
        for k, poly in enumerate(self.obstacles):
            for i, v in enumerate(poly.vertices):
                if same_point(v, a) or same_point(v, b):
                    continue
                if point_segment_distance(v, a, b) <= EPS:
                    t = ((v.x - a[0]) * dx + (v.y - a[1]) * dy) / den
                    bx, by = self._bisectors[(k, i)]
                    hits.append((t, Point(v.x + NUDGE * bx, v.y + NUDGE * by)))
        hits.sort()
        return [p for _, p in hits]

    def _general_position(self, pts: list[Point]) -> list[Point]:
        nm, gm = self._nudge_memo, self._graze_memo
        first = pts[0]
        if first not in nm:
            nm[first] = self._nudged(first)
        out = [nm[first]]
        for a, b in zip(pts, pts[1:]):
            if (a, b) not in gm:
                gm[(a, b)] = self._grazed(a, b)
            out.extend(gm[(a, b)])
            if b not in nm:
                nm[b] = self._nudged(b)
            out.append(nm[b])
        return out

    # -- sleeve and funnel -------------------------------------------------

    def _walk(self, t: int, a, b, stack: list[int]) -> int:
        key = (t, a, b)
        hit = self._walk_memo.get(key)
        if hit is None:
            seq: list[int] = []
            hit = (self._trace(t, a, b, seq), tuple(seq))
            self._walk_memo[key] = hit
        for nxt in hit[1]:
            if len(stack) >= 2 and stack[-2] == nxt:
                stack.pop()
            else:
                stack.append(nxt)
        return hit[0]

    def _trace(self, t: int, a, b, seq: list[int]) -> int:
        """Triangle containing ``b``; crossed triangles are appended to ``seq``."""
        tri = self.tri
        P = tri.points
        entry = None
        for _ in range(100000):
            if tri.contains(t, b):
                return t
            i, j, k = tri.triangles[t]
            best, best_s = None, -math.inf
            for u, w in ((i, j), (j, k), (k, i)):
                if entry is not None and {u, w} == entry:
                    continue
                su = cross(a, b, P[u])
                sw = cross(a, b, P[w])
                if (su >= 0) == (sw >= 0):
                    continue
                ex, ey = P[w].x - P[u].x, P[w].y - P[u].y
                den = (b[0] - a[0]) * ey - (b[1] - a[1]) * ex
                if den == 0.0:
                    continue
                s = ((P[u].x - a[0]) * ey - (P[u].y - a[1]) * ex) / den
                if s > best_s:
                    best, best_s = (u, w), s
            if best is None:
                raise InputNotInFreeSpace("lost track of the polyline in the triangulation")
            nxt = tri.neighbor(t, *best)
            if nxt is None:
                raise InputNotInFreeSpace("polyline leaves free space")
            seq.append(nxt)
            entry = set(best)
            t = nxt
        raise InputNotInFreeSpace("triangle walk did not terminate")

    def sleeve(self, pts: list[Point]) -> list[int]:
        t = self._locate_memo.get(pts[0])
        if t is None:
            t = self._locate_memo[pts[0]] = self.tri.locate(pts[0])
        if t is None:
            raise InputNotInFreeSpace(f"{tuple(pts[0])} is not in free space")
        stack = [t]
        for a, b in zip(pts, pts[1:]):
            t = self._walk(t, a, b, stack)
        return stack

    def _portals(self, stack: list[int]) -> list[tuple[int, int]]:
        tri = self.tri
        P = tri.points
        memo = self._portal_memo
        out = []
        for t, s in zip(stack, stack[1:]):
            hit = memo.get((t, s))
            if hit is not None:
                out.append(hit)
                continue
            shared = set(tri.triangles[t]) & set(tri.triangles[s])
            u, w = sorted(shared)
            (x,) = set(tri.triangles[t]) - shared
            memo[(t, s)] = (w, u) if cross(P[x], P[u], P[w]) > 0 else (u, w)
            out.append(memo[(t, s)])
        return out

    def tighten(self, polyline) -> TautCable:
        pts = dedupe(polyline)
        if not pts:
            raise ValueError("empty polyline")
        if len(pts) == 1:
            return TautCable((pts[0],), 0.0)
        if not self.covers(pts):
            raise InputNotInFreeSpace("polyline leaves the triangulated region")
        work = self._general_position(pts)
        portals = self._portals(self.sleeve(work))
        apexes = funnel(work[0], work[-1], portals, self.tri.points)
        path = [pts[0]] + [self.tri.points[i] for i in apexes[1:-1]] + [pts[-1]]
        return TautCable.of(_clean(path))


def funnel(start, end, portals: list[tuple[int, int]], points) -> list[int]:
    """String pulling through (left, right) portals given as point indices.

    Returns apex indices; ``-1`` stands for ``start`` and ``-2`` for ``end``.
    """

    # negative indices land on the appended endpoints
    Q = list(points) + [end, start]

    def turn(o, a, b):
        ox, oy = Q[o]
        ax, ay = Q[a]
        bx, by = Q[b]
        return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)

    gates = [(-1, -1)] + list(portals) + [(-2, -2)]
    path = [-1]
    apex = left = right = -1
    apex_i = left_i = right_i = 0
    i = 1
    while i < len(gates):
        pl, pr = gates[i]
        # a point collinear with the apex and the far side does not cross it;
        # inputs on triangulation edges produce exactly that
        if turn(apex, right, pr) >= 0:
            if apex == right or turn(apex, left, pr) <= 0:
                right, right_i = pr, i
            else:
                path.append(left)
                apex, apex_i = left, left_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        if turn(apex, left, pl) <= 0:
            if apex == left or turn(apex, right, pl) >= 0:
                left, left_i = pl, i
            else:
                path.append(right)
                apex, apex_i = right, right_i
                left = right = apex
                left_i = right_i = apex_i
                i = apex_i + 1
                continue
        i += 1
    if path[-1] != -2:
        path.append(-2)
    return path


def _clean(path: list[Point]) -> list[Point]:
    """Drop repeated points and interior vertices the path runs straight through."""
    pts = dedupe(path)
    changed = True
    while changed and len(pts) > 2:
        changed = False
        for i in range(1, len(pts) - 1):
            a, v, b = pts[i - 1], pts[i], pts[i + 1]
            scale = max(dist(a, v) * dist(v, b), 1e-300)
            straight = (abs(cross(a, v, b)) <= 1e-12 * scale
                        and (v.x - a.x) * (b.x - v.x) + (v.y - a.y) * (b.y - v.y) > 0)
            if straight:
                del pts[i]
                changed = True
                break
    return pts


@lru_cache(maxsize=64)
def _cached_tightener(obstacles: tuple[Polygon, ...], box) -> Tightener:
    return Tightener(obstacles, box)


def tightener_for(obstacles, points=()) -> Tightener:
    """A shared tightener whose box covers the obstacles and ``points``."""
    if isinstance(obstacles, Tightener):
        if obstacles.covers(points):
            return obstacles
        obstacles = obstacles.obstacles
    obstacles = tuple(obstacles)
    pts = [v for o in obstacles for v in o.vertices] + [tuple(p) for p in points]
    if not pts:
        pts = [(0.0, 0.0)]
    x0 = min(p[0] for p in pts)
    y0 = min(p[1] for p in pts)
    x1 = max(p[0] for p in pts)
    y1 = max(p[1] for p in pts)
    # quantize the box so nearby queries share one triangulation
    span = max(x1 - x0, y1 - y0, 1.0)
    q = 2.0 ** math.ceil(math.log2(span))
    box = (math.floor(x0 / q) * q - 2 * q, math.floor(y0 / q) * q - 2 * q,
           math.ceil(x1 / q) * q + 2 * q, math.ceil(y1 / q) * q + 2 * q)
    return _cached_tightener(obstacles, box)


def tighten(polyline, obstacles) -> TautCable:
    """Shortest polyline homotopic to ``polyline`` with the same endpoints."""
    pts = [tuple(p) for p in polyline]
    return tightener_for(obstacles, pts).tighten(pts)


def cable_after_move(c: TautCable, v_a, v_b, obstacles, check: bool = True) -> TautCable:
    """Cable after robot a moves straight to ``v_a`` and b to ``v_b``."""
    tt = tightener_for(obstacles, [v_a, v_b])
    if check:
        if not same_point(v_a, c.first) and not visible(c.first, v_a, tt.obstacles):
            raise NotVisible(f"{tuple(v_a)} not visible from {tuple(c.first)}")
        if not same_point(v_b, c.last) and not visible(c.last, v_b, tt.obstacles):
            raise NotVisible(f"{tuple(v_b)} not visible from {tuple(c.last)}")
    return tt.tighten([v_a, *c.verts, v_b])


def path_prefix(tau, t: float) -> list[Point]:
    """Prefix of ``tau`` up to arc-length fraction ``t``."""
    pts = [Point(float(p[0]), float(p[1])) for p in tau]
    total = polyline_length(pts)
    if total == 0.0 or t <= 0.0:
        return [pts[0]]
    if t >= 1.0:
        return pts
    target = t * total
    out = [pts[0]]
    acc = 0.0
    for a, b in zip(pts, pts[1:]):
        d = dist(a, b)
        if acc + d >= target:
            f = (target - acc) / d if d > 0 else 0.0
            out.append(Point(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)))
            return out
        acc += d
        out.append(b)
    return out


def point_at(tau, t: float) -> Point:
    return path_prefix(tau, t)[-1]


def cat_curve(tau_a, tau_b, c0, t: float) -> list[Point]:
    """Robot a's traversed prefix (reversed), the initial cable, b's prefix."""
    if not same_point(tau_a[0], c0[0]) or not same_point(tau_b[0], c0[-1]):
        raise ValueError("paths must start at the ends of the initial cable")
    pa = path_prefix(tau_a, t)
    pb = path_prefix(tau_b, t)
    return list(reversed(pa)) + [Point(float(p[0]), float(p[1])) for p in c0] + pb


def sampled_consumption(tau_a, tau_b, c0, obstacles, n: int = 200) -> list[tuple[float, float]]:
    """Taut cable length at ``n + 1`` evenly spaced common curve parameters."""
    pts = list(tau_a) + list(tau_b) + list(c0)
    tt = tightener_for(obstacles, pts)
    out = []
    for i in range(n + 1):
        t = i / n
        out.append((t, tt.tighten(cat_curve(tau_a, tau_b, c0, t)).length))
    return out


def cstar_upper(tau_a, tau_b, c0, obstacles, n: int = 200) -> float:
    """Upper bound on the shortest cable that permits executing both paths."""
    return max(length for _, length in sampled_consumption(tau_a, tau_b, c0, obstacles, n))
