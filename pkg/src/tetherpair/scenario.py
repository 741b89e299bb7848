"""Problem instances: data model, validation and JSON I/O.

File format::

    {"obstacles": [[[x, y], ...], ...],
     "ra": [x, y], "rb": [x, y], "da": [x, y], "db": [x, y],
     "ell": 8.0,
     "cable": [[x, y], ...]}
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from .geom import (
    INTERIOR,
    Point,
    Polygon,
    as_point,
    dedupe,
    point_in_polygon,
    polyline_length,
    same_point,
    segments_intersect,
    visible,
)

log = logging.getLogger(__name__)

OBSTACLE_OVERLAP = "OBSTACLE_OVERLAP"
POINT_IN_OBSTACLE = "POINT_IN_OBSTACLE"
CABLE_ENDPOINT_MISMATCH = "CABLE_ENDPOINT_MISMATCH"
CABLE_TOO_LONG = "CABLE_TOO_LONG"
CABLE_CROSSES_OBSTACLE = "CABLE_CROSSES_OBSTACLE"
BAD_POLYGON = "BAD_POLYGON"


class ParseError(Exception):
    """The file is missing, is not JSON, or does not follow the schema."""


class ValidationError(Exception):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"{v.code}: {v.message}" for v in self.violations))

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class Scenario:
    obstacles: tuple[Polygon, ...]
    r_a: Point
    r_b: Point
    d_a: Point
    d_b: Point
    ell: float
    c0: tuple[Point, ...]
    name: str = field(default="", compare=False)

    def with_ell(self, ell: float) -> "Scenario":
        return replace(self, ell=float(ell))

    def points(self) -> list[Point]:
        pts = [self.r_a, self.r_b, self.d_a, self.d_b, *self.c0]
        for o in self.obstacles:
            pts.extend(o.vertices)
        return pts

    def to_dict(self) -> dict:
        return {
            "obstacles": [[[v.x, v.y] for v in o.vertices] for o in self.obstacles],
            "ra": list(self.r_a),
            "rb": list(self.r_b),
            "da": list(self.d_a),
            "db": list(self.d_b),
            "ell": self.ell,
            "cable": [list(p) for p in self.c0],
        }

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "Scenario":
        try:
            obstacles = []
            for k, coords in enumerate(data.get("obstacles", [])):
                poly = Polygon.from_coords(coords)
                if len(poly) >= 3 and poly.area < 0:
                    log.warning("obstacle %d given clockwise; reversing", k)
                    poly = poly.ccw()
                obstacles.append(poly)
            return cls(
                obstacles=tuple(obstacles),
                r_a=as_point(data["ra"]),
                r_b=as_point(data["rb"]),
                d_a=as_point(data["da"]),
                d_b=as_point(data["db"]),
                ell=float(data["ell"]),
                c0=tuple(as_point(p) for p in data["cable"]),
                name=name,
            )
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise ParseError(f"bad scenario data: {exc}") from exc


def _polygons_touch(p: Polygon, q: Polygon) -> bool:
    for e in p.edges():
        for f in q.edges():
            if segments_intersect(e, f, "touching"):
                return True
    return (point_in_polygon(p.vertices[0], q) != "exterior"
            or point_in_polygon(q.vertices[0], p) != "exterior")


def validate(s: Scenario) -> list[Violation]:
    """Every violated instance invariant; empty iff the scenario is valid."""
    out: list[Violation] = []
    good = []
    for i, o in enumerate(s.obstacles):
        probs = o.problems()
        if probs:
            out.append(Violation(BAD_POLYGON, f"obstacle {i}: {', '.join(probs)}"))
        else:
            good.append((i, o.ccw()))
    for a in range(len(good)):
        for b in range(a + 1, len(good)):
            (i, p), (j, q) = good[a], good[b]
            if _polygons_touch(p, q):
                out.append(Violation(OBSTACLE_OVERLAP, f"obstacles {i} and {j} are not disjoint"))
    polys = [o for _, o in good]
    for label, pt in (("ra", s.r_a), ("rb", s.r_b), ("da", s.d_a), ("db", s.d_b)):
        for i, o in enumerate(polys):
            if point_in_polygon(pt, o) == INTERIOR:
                out.append(Violation(POINT_IN_OBSTACLE, f"{label} {tuple(pt)} inside obstacle {i}"))
    if not s.c0:
        out.append(Violation(CABLE_ENDPOINT_MISMATCH, "cable is empty"))
        return out
    if not same_point(s.c0[0], s.r_a) or not same_point(s.c0[-1], s.r_b):
        out.append(Violation(CABLE_ENDPOINT_MISMATCH, "cable must start at ra and end at rb"))
    length = polyline_length(s.c0)
    if length > s.ell + 1e-9:
        out.append(Violation(CABLE_TOO_LONG, f"cable length {length:.6g} exceeds ell={s.ell:.6g}"))
    pts = dedupe(s.c0)
    for k, p in enumerate(pts):
        if any(point_in_polygon(p, o) == INTERIOR for o in polys):
            out.append(Violation(CABLE_CROSSES_OBSTACLE, f"cable point {k} inside an obstacle"))
    for k in range(len(pts) - 1):
        if not visible(pts[k], pts[k + 1], polys):
            out.append(Violation(CABLE_CROSSES_OBSTACLE, f"cable segment {k} enters an obstacle"))
    if s.ell <= 0:
        out.append(Violation(CABLE_TOO_LONG, "ell must be positive"))
    return out


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    s = Scenario.from_dict(data, name=path.stem)
    violations = validate(s)
    if violations:
        raise ValidationError(violations)
    return s


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(json.dumps(s.to_dict(), indent=1) + "\n", encoding="utf-8")
