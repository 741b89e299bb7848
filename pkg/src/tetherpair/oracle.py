"""Brute-force validators for the planning pipeline.

Nothing here imports the triangulation, cable, visibility-graph or planner
code; only :mod:`tetherpair.geom` is shared. The tightening oracle is an
iterative rubber band: an interior vertex ``v`` between ``a`` and ``b`` is
replaced by the shortest a-to-b path inside triangle ``a v b`` that keeps the
obstacle material of the triangle on the far side, i.e. the v-facing chain of
the convex hull of ``{a, b}`` and the clipped obstacles.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from math import gcd
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .geom import (
    EPS,
    INTERIOR,
    Point,
    Polygon,
    convex_hull,
    cross,
    dedupe,
    dist,
    orientation,
    point_in_polygon,
    polyline_length,
    same_point,
    signed_area,
    visible,
)


class Unreachable(Exception):
    pass


# -- rubber band tightening ------------------------------------------------

def _clip(subject: Sequence[Point], clipper: Sequence[Point]) -> list[Point]:
    """Sutherland-Hodgman clip of any polygon against a CCW convex polygon."""
    out = list(subject)
    n = len(clipper)
    for i in range(n):
        if not out:
            break
        c1, c2 = clipper[i], clipper[(i + 1) % n]
        inp, out = out, []
        for j in range(len(inp)):
            p, q = inp[j - 1], inp[j]
            p_in = cross(c1, c2, p) >= 0
            q_in = cross(c1, c2, q) >= 0
            if q_in:
                if not p_in:
                    out.append(_line_hit(p, q, c1, c2))
                out.append(q)
            elif p_in:
                out.append(_line_hit(p, q, c1, c2))
    return out


def _line_hit(p, q, c1, c2) -> Point:
    dp = cross(c1, c2, p)
    dq = cross(c1, c2, q)
    t = dp / (dp - dq)
    return Point(p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def _taut_chain(a: Point, v: Point, b: Point, obstacles) -> list[Point]:
    """Shortest a-b path homotopic to a-v-b within the closed triangle."""
    turn = orientation(a, v, b)
    if turn == 0:
        return [a, b]
    tri = [a, v, b] if turn > 0 else [a, b, v]
    x0 = min(a.x, v.x, b.x)
    x1 = max(a.x, v.x, b.x)
    y0 = min(a.y, v.y, b.y)
    y1 = max(a.y, v.y, b.y)
    material: list[Point] = []
    for poly in obstacles:
        px0, py0, px1, py1 = poly.bbox()
        if px1 < x0 or px0 > x1 or py1 < y0 or py0 > y1:
            continue
        piece = _clip(poly.vertices, tri)
        if len(piece) >= 3 and abs(signed_area(piece)) > 1e-12:
            # clip points that are vertices up to round-off become those vertices
            anchors = list(poly.vertices) + [a, v, b]
            material.extend(next((w for w in anchors if same_point(w, p, 1e-9)), p) for p in piece)
    if not material:
        return [a, b]
    hull = convex_hull(material + [a, b])
    if a not in hull or b not in hull:
        return [a, v, b]
    ia, ib = hull.index(a), hull.index(b)
    n = len(hull)
    fwd = [hull[(ia + k) % n] for k in range(((ib - ia) % n) + 1)]
    bwd = [hull[(ia - k) % n] for k in range(((ia - ib) % n) + 1)]
    side = orientation(a, b, v)
    for chain in (fwd, bwd):
        inner = chain[1:-1]
        if inner and all(orientation(a, b, p) != -side for p in inner) \
                and any(orientation(a, b, p) == side for p in inner):
            return chain
    return [a, b]


def rubber_band_tighten(polyline, obstacles: Sequence[Polygon], max_iter: int = 100000) -> list[Point]:
    """Independent shortest-homotopic-path computation (slow, simple)."""
    obstacles = [o.ccw() for o in obstacles]
    pts = dedupe(polyline)
    for _ in range(max_iter):
        if len(pts) <= 2:
            break
        for i in range(1, len(pts) - 1):
            chain = _taut_chain(pts[i - 1], pts[i], pts[i + 1], obstacles)
            if len(chain) == 3 and chain[1] == pts[i]:
                continue
            pts = dedupe(pts[:i] + chain[1:-1] + pts[i + 1:])
            break
        else:
            break
    else:
        raise RuntimeError("rubber band did not converge")
    return pts


# -- dense grid distances --------------------------------------------------

def _directions(radius: int) -> list[tuple[int, int]]:
    out = []
    for dx in range(-radius, radius + 1):
        for dy in range(-radius, radius + 1):
            if (dx, dy) != (0, 0) and gcd(abs(dx), abs(dy)) == 1:
                out.append((dx, dy))
    return out


def _inside_any(xs: np.ndarray, ys: np.ndarray, obstacles) -> np.ndarray:
    """Vectorized strict-interior test (boundary counts as free)."""
    res = np.zeros(xs.shape, dtype=bool)
    for poly in obstacles:
        vs = np.array(poly.vertices)
        inside = np.zeros(xs.shape, dtype=bool)
        onb = np.zeros(xs.shape, dtype=bool)
        for k in range(len(vs)):
            ax, ay = vs[k]
            bx, by = vs[(k + 1) % len(vs)]
            cond = (ay > ys) != (by > ys)
            with np.errstate(divide="ignore", invalid="ignore"):
                xi = ax + (ys - ay) * (bx - ax) / (by - ay)
            inside ^= cond & (xi > xs)
            # distance to edge for the boundary band
            ex, ey = bx - ax, by - ay
            t = np.clip(((xs - ax) * ex + (ys - ay) * ey) / (ex * ex + ey * ey), 0, 1)
            d = np.hypot(ax + t * ex - xs, ay + t * ey - ys)
            onb |= d <= EPS
        res |= inside & ~onb
    return res


def _segments_blocked(x0, y0, x1, y1, obstacles, samples: int = 8) -> np.ndarray:
    """Vectorized test that segments enter an obstacle interior."""
    blocked = np.zeros(x0.shape, dtype=bool)
    for poly in obstacles:
        vs = np.array(poly.vertices)
        for k in range(len(vs)):
            ax, ay = vs[k]
            bx, by = vs[(k + 1) % len(vs)]
            d1 = (bx - ax) * (y0 - ay) - (by - ay) * (x0 - ax)
            d2 = (bx - ax) * (y1 - ay) - (by - ay) * (x1 - ax)
            d3 = (x1 - x0) * (ay - y0) - (y1 - y0) * (ax - x0)
            d4 = (x1 - x0) * (by - y0) - (y1 - y0) * (bx - x0)
            blocked |= (d1 * d2 < -EPS) & (d3 * d4 < -EPS)
    for k in range(1, samples):
        f = k / samples
        blocked |= _inside_any(x0 + f * (x1 - x0), y0 + f * (y1 - y0), obstacles)
    return blocked


def grid_shortest_path(p, q, s, resolution: float = 0.05, radius: int = 4, pad: float = 1.0) -> float:
    """Shortest free path between ``p`` and ``q`` over a dense lattice.

    Lattice nodes connect to every node reachable by a primitive offset of
    Chebyshev length <= ``radius``; ``p`` and ``q`` attach to visible nodes
    within ``radius`` cells.
    """
    if same_point(p, q):
        return 0.0
    obstacles = [o.ccw() for o in s.obstacles]
    pts = [p, q] + [v for o in obstacles for v in o.vertices]
    xmin = min(pt[0] for pt in pts) - pad
    ymin = min(pt[1] for pt in pts) - pad
    xmax = max(pt[0] for pt in pts) + pad
    ymax = max(pt[1] for pt in pts) + pad
    nx = int(math.ceil((xmax - xmin) / resolution)) + 1
    ny = int(math.ceil((ymax - ymin) / resolution)) + 1
    gx, gy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    X = xmin + gx.ravel() * resolution
    Y = ymin + gy.ravel() * resolution
    free = ~_inside_any(X, Y, obstacles)
    n = nx * ny
    rows, cols, wts = [], [], []
    ii = gx.ravel()
    jj = gy.ravel()
    for dx, dy in _directions(radius):
        if (dx, dy) < (0, 0):
            continue  # undirected; each pair once
        ok = (ii + dx >= 0) & (ii + dx < nx) & (jj + dy >= 0) & (jj + dy < ny)
        src = np.nonzero(ok)[0]
        dst = (ii[src] + dx) * ny + (jj[src] + dy)
        keep = free[src] & free[dst]
        src, dst = src[keep], dst[keep]
        bad = _segments_blocked(X[src], Y[src], X[dst], Y[dst], obstacles)
        src, dst = src[~bad], dst[~bad]
        rows.append(src)
        cols.append(dst)
        wts.append(np.full(src.shape, resolution * math.hypot(dx, dy)))
    # terminal attachments
    extra_rows, extra_cols, extra_w = [], [], []
    for k, pt in enumerate((p, q)):
        node = n + k
        ci = (pt[0] - xmin) / resolution
        cj = (pt[1] - ymin) / resolution
        lo_i, hi_i = int(math.floor(ci)) - radius, int(math.ceil(ci)) + radius
        lo_j, hi_j = int(math.floor(cj)) - radius, int(math.ceil(cj)) + radius
        cand = [(a, b) for a in range(max(lo_i, 0), min(hi_i, nx - 1) + 1)
                for b in range(max(lo_j, 0), min(hi_j, ny - 1) + 1)]
        idx = np.array([a * ny + b for a, b in cand])
        idx = idx[free[idx]]
        px = np.full(idx.shape, float(pt[0]))
        py = np.full(idx.shape, float(pt[1]))
        bad = _segments_blocked(px, py, X[idx], Y[idx], obstacles)
        idx = idx[~bad]
        extra_rows.append(np.full(idx.shape, node))
        extra_cols.append(idx)
        extra_w.append(np.hypot(X[idx] - pt[0], Y[idx] - pt[1]) + 1e-300)
    if visible(p, q, obstacles):
        return dist(p, q)
    r = np.concatenate(rows + extra_rows)
    c = np.concatenate(cols + extra_cols)
    w = np.concatenate(wts + extra_w)
    m = coo_matrix((w, (r, c)), shape=(n + 2, n + 2)).tocsr()
    d = dijkstra(m, directed=False, indices=n)[n + 1]
    if not np.isfinite(d):
        raise Unreachable(f"{tuple(p)} and {tuple(q)} are not connected on the grid")
    return float(d)


# -- exhaustive pair search ------------------------------------------------

@dataclass
class PairSearchResult:
    cost: float | None  # None: infeasible within the step limit
    cost_a: float | None = None
    cost_b: float | None = None
    pi_a: tuple = ()
    pi_b: tuple = ()
    states: int = 0

    @property
    def feasible(self) -> bool:
        return self.cost is not None


def _move_graph(s) -> tuple[list[Point], list[list[int]], dict]:
    """Vertices and moves: obstacle vertices plus terminals, bitangent edges."""
    obstacles = [o.ccw() for o in s.obstacles]
    verts: list[Point] = []
    nbr: list = []  # obstacle neighbours (prev, next) or None
    edges = set()
    for poly in obstacles:
        base = len(verts)
        m = len(poly.vertices)
        for i, v in enumerate(poly.vertices):
            verts.append(v)
            nbr.append((poly.vertices[i - 1], poly.vertices[(i + 1) % m]))
            edges.add((base + i, base + (i + 1) % m))
            edges.add((base + (i + 1) % m, base + i))
    term = {}
    for name, p in (("r_a", s.r_a), ("r_b", s.r_b), ("d_a", s.d_a), ("d_b", s.d_b)):
        hit = next((i for i, v in enumerate(verts) if same_point(v, p)), None)
        if hit is None:
            verts.append(Point(*p))
            nbr.append(None)
            hit = len(verts) - 1
        term[name] = hit
        nbr[hit] = None
    terms = set(term.values())
    adj: list[list[int]] = [[] for _ in verts]
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            ok = (i, j) in edges
            if not ok and visible(verts[i], verts[j], obstacles):
                # terminal edges are kept whole; elsewhere both ends must be tangent
                ok = i in terms or j in terms or all(
                    nbr[u] is None
                    or orientation(verts[u], verts[w], nbr[u][0]) * orientation(verts[u], verts[w], nbr[u][1]) >= 0
                    for u, w in ((i, j), (j, i)))
            if ok:
                adj[i].append(j)
                adj[j].append(i)
    return verts, adj, term


def exhaustive_pair_search(s, max_steps: int = 4, growth: float = 1.15) -> PairSearchResult:
    """Minimum max path length over all joint move sequences of bounded length.

    Every step moves each robot to a graph neighbour or keeps it in place (not
    both in place). Sequences reaching the goals with a taut cable no longer
    than ``ell`` are accepted. States with identical cables are merged, keeping
    only Pareto-minimal cost pairs, and sequences whose admissible lower bound
    exceeds the current cost threshold are cut; the threshold grows until a
    solution within it is found, so the result is exact.
    """
    if max_steps > 6:
        raise ValueError("max_steps above 6 is not supported")
    obstacles = [o.ccw() for o in s.obstacles]
    verts, adj, term = _move_graph(s)
    da, db = verts[term["d_a"]], verts[term["d_b"]]
    ell = s.ell
    cache: dict = {}

    def tight(key):
        if key not in cache:
            cache[key] = tuple(rubber_band_tighten(list(key), obstacles))
        return cache[key]

    root = tight(tuple(Point(*p) for p in s.c0))
    index = {v: i for i, v in enumerate(verts)}

    def bound(cab, ga, gb):
        la = polyline_length(cab)
        return max(ga + dist(cab[0], da), gb + dist(cab[-1], db), 0.5 * (la + ga + gb - ell))

    threshold = bound(root, 0.0, 0.0)
    limit = max_steps * 2 * max((dist(verts[i], verts[j]) for i in range(len(verts)) for j in adj[i]), default=0.0)
    limit += threshold + 1.0
    states = 0
    while True:
        best = None
        next_threshold = math.inf
        level = {root: [(0.0, 0.0, (root[0],), (root[-1],))]}
        for depth in range(max_steps + 1):
            for cab, entries in level.items():
                if (same_point(cab[0], da) and same_point(cab[-1], db)
                        and polyline_length(cab) <= ell + 1e-9):
                    for ga, gb, pa, pb in entries:
                        c = max(ga, gb)
                        if best is None or c < best[0] - 1e-12:
                            best = (c, ga, gb, pa, pb)
            if depth == max_steps:
                break
            nxt: dict = {}
            for cab, entries in level.items():
                ia, ib = index[cab[0]], index[cab[-1]]
                moves_a = [None] + adj[ia]
                moves_b = [None] + adj[ib]
                for ma in moves_a:
                    for mb in moves_b:
                        if ma is None and mb is None:
                            continue
                        va = cab[0] if ma is None else verts[ma]
                        vb = cab[-1] if mb is None else verts[mb]
                        child = tight((va,) + cab + (vb,))
                        states += 1
                        for ga, gb, pa, pb in entries:
                            na = ga + dist(cab[0], va)
                            nb = gb + dist(cab[-1], vb)
                            lb = bound(child, na, nb)
                            if lb > threshold + 1e-12:
                                next_threshold = min(next_threshold, lb)
                                continue
                            bucket = nxt.setdefault(child, [])
                            if any(x <= na + 1e-12 and y <= nb + 1e-12 for x, y, _, _ in bucket):
                                continue
                            bucket[:] = [e for e in bucket if not (na <= e[0] + 1e-12 and nb <= e[1] + 1e-12)]
                            bucket.append((na, nb, pa + (va,), pb + (vb,)))
            level = nxt
        if best is not None:
            c, ga, gb, pa, pb = best
            return PairSearchResult(c, ga, gb, pa, pb, states)
        if not math.isfinite(next_threshold) or threshold > limit:
            return PairSearchResult(None, states=states)
        threshold = max(next_threshold, threshold * growth)


# -- segment taxonomy ------------------------------------------------------

def _classify(move_from: Point, move_to: Point, toward: Point) -> str:
    mx, my = move_to.x - move_from.x, move_to.y - move_from.y
    cx, cy = toward.x - move_from.x, toward.y - move_from.y
    nm, nc = math.hypot(mx, my), math.hypot(cx, cy)
    if nm == 0 or nc == 0:
        return "O"
    if abs(mx * cy - my * cx) > 1e-9 * nm * nc:
        return "O"
    return "F" if mx * cx + my * cy > 0 else "L"


def segment_profile(sol, s, mode: str = "partial") -> tuple[str, str]:
    """F/O/L letter per straight move of each robot.

    ``mode="partial"``: each robot's own path is classified with the other
    robot held at its start, i.e. against the cable its motion alone has
    produced from the initial cable. ``mode="steps"``: moves along the search
    steps, classified against the joint cable before that step. Staying
    emits no letter. All cables are rebuilt here with the rubber band.
    """
    obstacles = [o.ccw() for o in s.obstacles]
    c0 = rubber_band_tighten(list(s.c0), obstacles)
    if mode == "partial":
        out = []
        for path, tail in ((sol.pi_a, False), (sol.pi_b, True)):
            pts = dedupe(path)
            cab = c0 if tail else c0[::-1]
            letters = []
            for p0, p1 in zip(pts, pts[1:]):
                letters.append(_classify(p0, p1, cab[-2]) if len(cab) > 1 else "O")
                cab = rubber_band_tighten(cab + [p1], obstacles)
            out.append("".join(letters))
        return out[0], out[1]
    if mode != "steps":
        raise ValueError(f"unknown mode {mode!r}")
    steps = [(a, b) for a, b, *_ in sol.steps] if sol.steps else list(zip(sol.pi_a, sol.pi_b))
    cab = c0
    letters_a, letters_b = [], []
    for (a0, b0), (a1, b1) in zip(steps, steps[1:]):
        if not same_point(a0, a1):
            letters_a.append(_classify(a0, a1, cab[1]) if len(cab) > 1 else "O")
        if not same_point(b0, b1):
            letters_b.append(_classify(b0, b1, cab[-2]) if len(cab) > 1 else "O")
        cab = rubber_band_tighten([a1] + cab + [b1], obstacles)
    return "".join(letters_a), "".join(letters_b)


FOL = re.compile(r"^F*O*L*$")


def matches_fol(profile: str) -> bool:
    return FOL.match(profile) is not None


def winding_number_classify(p, poly: Polygon) -> str:
    """Reference point classification via winding number."""
    for a, b in poly.edges():
        if abs(cross(a, b, p)) <= EPS * max(1.0, dist(a, b)) and \
                min(a[0], b[0]) - EPS <= p[0] <= max(a[0], b[0]) + EPS and \
                min(a[1], b[1]) - EPS <= p[1] <= max(a[1], b[1]) + EPS:
            return "boundary"
    wn = 0
    for a, b in poly.edges():
        if a[1] <= p[1]:
            if b[1] > p[1] and cross(a, b, p) > 0:
                wn += 1
        elif b[1] <= p[1] and cross(a, b, p) < 0:
            wn -= 1
    return INTERIOR if wn != 0 else "exterior"


def in_free(p, obstacles) -> bool:
    return all(point_in_polygon(p, o) != INTERIOR for o in obstacles)
