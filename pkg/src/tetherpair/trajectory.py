"""Timed execution of a path pair and sampled checks of the execution."""

from __future__ import annotations

import csv
import io
from bisect import bisect_right
from dataclasses import dataclass, field

from .cable import InputNotInFreeSpace, tightener_for
from .geom import Point, dedupe, dist, in_free_space, polyline_length


class ZeroSpeed(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple[tuple[float, Point], ...]
    T: float
    speed: float

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.waypoints]

    def position(self, t: float) -> Point:
        wp = self.waypoints
        if t <= wp[0][0]:
            return wp[0][1]
        if t >= wp[-1][0]:
            return wp[-1][1]
        k = bisect_right(self.times, t) - 1
        (t0, p0), (t1, p1) = wp[k], wp[k + 1]
        f = (t - t0) / (t1 - t0)
        return Point(p0.x + f * (p1.x - p0.x), p0.y + f * (p1.y - p0.y))

    def traversed(self, t: float) -> list[Point]:
        """Path covered up to time ``t``, ending at the current position."""
        out = [p for s, p in self.waypoints if s < t]
        if not out:
            return [self.waypoints[0][1]]
        out.append(self.position(t))
        return out


def _timed(path, speed: float, T: float) -> Trajectory:
    pts = dedupe(path)
    if len(pts) == 1 or speed == 0.0:
        wps = ((0.0, pts[0]),) if T == 0.0 else ((0.0, pts[0]), (T, pts[0]))
        return Trajectory(wps, T, 0.0)
    wps = [(0.0, pts[0])]
    acc = 0.0
    for a, b in zip(pts, pts[1:]):
        acc += dist(a, b)
        wps.append((acc / speed, b))
    # speed = length / T, so arrival is T; pin it against round-off
    wps[-1] = (T, pts[-1])
    return Trajectory(tuple(wps), T, speed)


def make_execution(sol, mv: float) -> tuple[Trajectory, Trajectory]:
    """Both robots at constant speed, arriving together at T = max length / mv."""
    if not mv > 0:
        raise ZeroSpeed(f"maximum speed must be positive, got {mv}")
    la = polyline_length(dedupe(sol.pi_a))
    lb = polyline_length(dedupe(sol.pi_b))
    T = max(la / mv, lb / mv)
    if T == 0.0:
        return _timed(sol.pi_a, 0.0, 0.0), _timed(sol.pi_b, 0.0, 0.0)
    return _timed(sol.pi_a, la / T, T), _timed(sol.pi_b, lb / T, T)


@dataclass
class Violation:
    time: float
    condition: str  # C-I free space, C-II cable length, C-III continuity
    message: str


@dataclass
class ExecutionReport:
    samples: int
    max_cable: float
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_execution(tr_a: Trajectory, tr_b: Trajectory, s, n: int = 200) -> ExecutionReport:
    """Check free space, cable length and continuity at n + 1 common times."""
    T = max(tr_a.T, tr_b.T)
    pts = [p for _, p in tr_a.waypoints] + [p for _, p in tr_b.waypoints] + list(s.c0)
    tt = tightener_for(s.obstacles, pts)
    report = ExecutionReport(n + 1, 0.0)
    prev = None
    for i in range(n + 1):
        t = T * i / n
        pa, pb = tr_a.position(t), tr_b.position(t)
        for label, p in (("a", pa), ("b", pb)):
            if not in_free_space(p, s.obstacles):
                report.violations.append(Violation(t, "C-I", f"robot {label} at {tuple(p)} inside an obstacle"))
        curve = list(reversed(tr_a.traversed(t))) + list(s.c0) + tr_b.traversed(t)
        try:
            length = tt.tighten(curve).length
        except InputNotInFreeSpace:
            # a path through an obstacle leaves the cable's homotopy class undefined
            report.violations.append(Violation(t, "C-I", "traversed paths leave free space"))
        else:
            report.max_cable = max(report.max_cable, length)
            if length > s.ell + 1e-6:
                report.violations.append(Violation(t, "C-II", f"cable needs {length:.9g} > ell={s.ell:.9g}"))
        if prev is not None:
            t0, qa, qb = prev
            dt = t - t0
            for label, q, p, v in (("a", qa, pa, tr_a.speed), ("b", qb, pb, tr_b.speed)):
                if dist(q, p) > v * dt + 1e-9:
                    report.violations.append(Violation(t, "C-III", f"robot {label} jumps {dist(q, p):.9g} in {dt:.9g}s"))
        prev = (t, pa, pb)
    return report


def to_csv(tr_a: Trajectory, tr_b: Trajectory, n: int = 200, fmt=repr) -> str:
    """Rows of (t, x_a, y_a, x_b, y_b) at n + 1 common times."""
    T = max(tr_a.T, tr_b.T)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x_a", "y_a", "x_b", "y_b"])
    for i in range(n + 1):
        t = T * i / n
        pa, pb = tr_a.position(t), tr_b.position(t)
        w.writerow([fmt(x) for x in (t, pa.x, pa.y, pb.x, pb.y)])
    return buf.getvalue()
