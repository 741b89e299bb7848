"""Planar primitives and predicates shared by every other module.

All predicates work in plain double precision with a single absolute
tolerance ``EPS``. Coordinates are expected to be O(1e3) at most.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

EPS = 1e-9

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"


class Point(NamedTuple):
    x: float
    y: float


def as_point(p: Sequence[float]) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinate: {p!r}")
    return Point(x, y)


def cross(o: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """Twice the signed area of triangle ``o, a, b``."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orientation(p, q, r, eps: float = EPS) -> int:
    """+1 for a counter-clockwise turn p->q->r, -1 for clockwise, 0 if collinear."""
    c = cross(p, q, r)
    if c > eps:
        return 1
    if c < -eps:
        return -1
    return 0


def dist(p, q) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def same_point(p, q, eps: float = EPS) -> bool:
    return abs(p[0] - q[0]) <= eps and abs(p[1] - q[1]) <= eps


def on_segment(p, a, b, eps: float = EPS) -> bool:
    """True if ``p`` lies on the closed segment ``ab`` (within ``eps``)."""
    if orientation(a, b, p, eps) != 0:
        return False
    return (min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps)


def point_segment_distance(p, a, b) -> float:
    ax, ay = b[0] - a[0], b[1] - a[1]
    den = ax * ax + ay * ay
    if den == 0.0:
        return dist(p, a)
    t = ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / den
    t = min(1.0, max(0.0, t))
    return math.hypot(a[0] + t * ax - p[0], a[1] + t * ay - p[1])


def segments_intersect(s1, s2, mode: str = "proper", eps: float = EPS) -> bool:
    """Segment intersection test.

    ``proper`` reports only a crossing of the two open segments at a single
    point interior to both. ``touching`` additionally reports shared
    endpoints, an endpoint lying on the other segment, and collinear overlap.
    """
    (a, b), (c, d) = s1, s2
    o1 = orientation(a, b, c, eps)
    o2 = orientation(a, b, d, eps)
    o3 = orientation(c, d, a, eps)
    o4 = orientation(c, d, b, eps)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if mode == "proper":
        return False
    if mode != "touching":
        raise ValueError(f"unknown mode {mode!r}")
    return (on_segment(c, a, b, eps) or on_segment(d, a, b, eps)
            or on_segment(a, c, d, eps) or on_segment(b, c, d, eps))


def polyline_length(points: Sequence[Sequence[float]]) -> float:
    return sum(dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def dedupe(points: Iterable[Sequence[float]], eps: float = EPS) -> list[Point]:
    """Drop consecutive duplicate points."""
    out: list[Point] = []
    for p in points:
        p = Point(float(p[0]), float(p[1]))
        if not out or not same_point(out[-1], p, eps):
            out.append(p)
    return out


def signed_area(vertices: Sequence[Sequence[float]]) -> float:
    n = len(vertices)
    s = 0.0
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


@dataclass(frozen=True)
class Polygon:
    """Simple polygon, counter-clockwise after :meth:`ccw`."""

    vertices: tuple[Point, ...]

    @classmethod
    def from_coords(cls, coords) -> "Polygon":
        return cls(tuple(as_point(c) for c in coords))

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def ccw(self) -> "Polygon":
        if self.area < 0:
            return Polygon(tuple(reversed(self.vertices)))
        return self

    def neighbors(self, i: int) -> tuple[Point, Point]:
        n = len(self.vertices)
        return self.vertices[(i - 1) % n], self.vertices[(i + 1) % n]

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def problems(self) -> list[str]:
        """Human-readable list of polygon invariant violations."""
        out = []
        vs = self.vertices
        n = len(vs)
        if n < 3:
            return ["fewer than 3 vertices"]
        for i in range(n):
            if same_point(vs[i], vs[(i + 1) % n]):
                out.append(f"duplicate consecutive vertex at index {i}")
        if abs(self.area) <= EPS:
            out.append("zero area")
        edges = list(self.edges())
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if segments_intersect(edges[i], edges[j], "touching"):
                    out.append(f"edges {i} and {j} intersect")
        return out


def point_in_polygon(p, poly: Polygon, eps: float = EPS) -> str:
    """Classify ``p`` as interior, boundary or exterior of ``poly``."""
    for a, b in poly.edges():
        if point_segment_distance(p, a, b) <= eps:
            return BOUNDARY
    # even-odd ray casting to +x
    inside = False
    x, y = p[0], p[1]
    for a, b in poly.edges():
        if (a[1] > y) != (b[1] > y):
            xi = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if xi > x:
                inside = not inside
    return INTERIOR if inside else EXTERIOR


def in_free_space(p, obstacles: Sequence[Polygon]) -> bool:
    return all(point_in_polygon(p, o) != INTERIOR for o in obstacles)


def visible(p, q, obstacles: Sequence[Polygon], eps: float = EPS) -> bool:
    """True iff the open segment ``pq`` avoids every obstacle interior.

    Grazing contact with boundaries and vertices is allowed.
    """
    if same_point(p, q, eps):
        return in_free_space(p, obstacles)
    px, py = p[0], p[1]
    dx, dy = q[0] - px, q[1] - py
    den = dx * dx + dy * dy
    for poly in obstacles:
        x0, y0, x1, y1 = poly.bbox()
        if (max(p[0], q[0]) < x0 - eps or min(p[0], q[0]) > x1 + eps
                or max(p[1], q[1]) < y0 - eps or min(p[1], q[1]) > y1 + eps):
            continue
        for e in poly.edges():
            if segments_intersect((p, q), e, "proper", eps):
                return False
        # No proper crossings: between consecutive boundary contacts the
        # segment is entirely inside, outside or on the boundary.
        ts = [0.0, 1.0]
        for v in poly.vertices:
            if point_segment_distance(v, p, q) <= eps:
                ts.append(((v[0] - px) * dx + (v[1] - py) * dy) / den)
        ts = sorted(min(1.0, max(0.0, t)) for t in ts)
        for t0, t1 in zip(ts, ts[1:]):
            if t1 - t0 <= 1e-12:
                continue
            tm = 0.5 * (t0 + t1)
            m = (px + tm * dx, py + tm * dy)
            if point_in_polygon(m, poly, eps) == INTERIOR:
                return False
    return True


def bisector_into_free(poly: Polygon, i: int) -> tuple[float, float]:
    """Unit direction at vertex ``i`` that bisects the free-space wedge."""
    v = poly.vertices[i]
    prev, nxt = poly.neighbors(i)
    a1 = math.atan2(prev[1] - v[1], prev[0] - v[0])
    a2 = math.atan2(nxt[1] - v[1], nxt[0] - v[0])
    # CCW polygon: interior lies counter-clockwise from the next-edge to the
    # prev-edge direction, so free space spans prev -> next counter-clockwise.
    span = (a2 - a1) % (2 * math.pi)
    ang = a1 + 0.5 * span
    return math.cos(ang), math.sin(ang)


def convex_hull(points: Iterable[Sequence[float]]) -> list[Point]:
    """Monotone-chain hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set(Point(float(p[0]), float(p[1])) for p in points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def rotate(p, angle: float, about=(0.0, 0.0)) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    x, y = p[0] - about[0], p[1] - about[1]
    return Point(about[0] + c * x - s * y, about[1] + s * x + c * y)
