"""Best-first search over taut cable configurations.

A node holds the taut cable (its ends are the robot positions) and the
distance each robot has travelled. Children come from moving each robot to a
graph neighbour or keeping it in place; the cable of a child is the tightened
concatenation of the two moves with the parent cable. The objective is the
larger of the two travelled distances.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field

from .cable import TautCable, tightener_for
from .geom import Point, dist, polyline_length, same_point
from .scenario import Scenario
from .visgraph import VisGraph, build_rvg, shortest_dists_from

HEURISTICS = ("none", "sld", "spd", "jr")
TOL = 1e-9


@dataclass(eq=False)
class SearchNode:
    # None until the node is popped: priorities only need the end positions,
    # so tightening is deferred and skipped for nodes never reached
    cable: TautCable | None
    cost_a: float
    cost_b: float
    parent: "SearchNode | None" = None
    f: float = 0.0
    key: tuple = ()
    # graph vertices of the two ends; None in ``move`` means stay
    ends: tuple = ()
    move: tuple = ()
    jr_done: bool = False

    @property
    def g(self) -> float:
        return max(self.cost_a, self.cost_b)


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    wall_time: float = 0.0
    budget_exhausted: bool = False

    def to_dict(self) -> dict:
        return {"expanded": self.expanded, "generated": self.generated, "wall_time_s": self.wall_time}


@dataclass
class Solution:
    pi_a: tuple[Point, ...]
    pi_b: tuple[Point, ...]
    cost_a: float
    cost_b: float
    final_cable: TautCable
    # the unprocessed parent chain: one (a, b) pair and cable per step
    steps: tuple = field(default=(), repr=False)

    @property
    def max_cost(self) -> float:
        return max(self.cost_a, self.cost_b)

    def to_dict(self) -> dict:
        return {
            "pi_a": [list(p) for p in self.pi_a],
            "pi_b": [list(p) for p in self.pi_b],
            "cost_a": self.cost_a,
            "cost_b": self.cost_b,
            "final_cable": [list(p) for p in self.final_cable.verts],
        }


@dataclass
class Infeasible:
    reason: str = "no solution"

    @property
    def max_cost(self) -> float:
        return math.inf


@dataclass
class PlanOptions:
    # discard children whose taut cable already exceeds ell
    prune: bool = True
    max_expansions: int = 200_000
    # replace each returned path by its shortest homotopic version
    tauten: bool = True
    # expansion budget of a jr sub-solve; None means 10 x graph size
    jr_budget: int | None = None


def heuristic_sld(node: SearchNode, s: Scenario) -> float:
    return max(dist(node.cable.first, s.d_a), dist(node.cable.last, s.d_b))


def heuristic_spd(node: SearchNode, s: Scenario, precomp) -> float:
    to_a, to_b, index = precomp
    return max(to_a[index[node.cable.first]], to_b[index[node.cable.last]])


class _Search:
    """State shared by one plan() call and its jr sub-solves."""

    def __init__(self, s: Scenario, g: VisGraph, opts: PlanOptions):
        self.s = s
        self.g = g
        self.opts = opts
        pts = list(g.vertices) + list(s.c0)
        self.tt = tightener_for(s.obstacles, pts)
        self.index = {v: i for i, v in enumerate(g.vertices)}
        self.to_a = shortest_dists_from(g, g.terminals["d_a"])
        self.to_b = shortest_dists_from(g, g.terminals["d_b"])
        self.goal_a = g.vertices[g.terminals["d_a"]]
        self.goal_b = g.vertices[g.terminals["d_b"]]
        self.moves: dict = {}
        self.jr_cache: dict = {}

    def key(self, cable: TautCable) -> tuple:
        return tuple(self.index.get(p, p) for p in cable.verts)

    def child_cable(self, cable: TautCable, va: int | None, vb: int | None) -> TautCable:
        k = (cable.verts, va, vb)
        c = self.moves.get(k)
        if c is None:
            pa = cable.first if va is None else self.g.vertices[va]
            pb = cable.last if vb is None else self.g.vertices[vb]
            c = self.tt.tighten([pa, *cable.verts, pb])
            self.moves[k] = c
        return c

    def per_robot(self, h: str, ia: int, ib: int) -> tuple[float, float]:
        if h == "none":
            return 0.0, 0.0
        if h == "sld":
            v = self.g.vertices
            return dist(v[ia], self.goal_a), dist(v[ib], self.goal_b)
        return self.to_a[ia], self.to_b[ib]

    def priority(self, h: str, ia: int, ib: int, ca: float, cb: float) -> float:
        ha, hb = self.per_robot(h, ia, ib)
        return max(ca + ha, cb + hb)

    def is_goal(self, node: SearchNode, ell: float) -> bool:
        c = node.cable
        return same_point(c.first, self.goal_a) and same_point(c.last, self.goal_b) and c.length <= ell + TOL

    def make_root(self, cable: TautCable, ca: float, cb: float, h: str) -> SearchNode:
        ends = (self.index[cable.first], self.index[cable.last])
        f = self.priority(h, *ends, ca, cb)
        return SearchNode(cable, ca, cb, None, f, self.key(cable), ends)

    def run(self, root: SearchNode, ell: float, h: str, budget: int, stats: SearchStats) -> SearchNode | None:
        """A* from ``root``. None: no solution, or the budget ran out."""
        base = "spd" if h == "jr" else h
        tie = itertools.count()
        frontier = [(root.f, root.g, root.ends, next(tie), root)]
        pareto: dict = {}
        while frontier:
            f, _, _, _, node = heapq.heappop(frontier)
            if node.cable is None:
                node.cable = self.child_cable(node.parent.cable, *node.move)
                if self.opts.prune and node.cable.length > ell + TOL:
                    continue
                node.key = self.key(node.cable)
            # same cable and no worse in both costs: same future, skip
            entries = pareto.setdefault(node.key, [])
            if any(ea <= node.cost_a + TOL and eb <= node.cost_b + TOL for ea, eb in entries):
                continue
            if h == "jr" and not node.jr_done:
                self._refine_jr(node, ell)
                if node.f > f + TOL:
                    if math.isfinite(node.f):
                        heapq.heappush(frontier, (node.f, node.g, node.ends, next(tie), node))
                    continue
            entries.append((node.cost_a, node.cost_b))
            if self.is_goal(node, ell):
                return node
            if stats.expanded >= budget:
                stats.budget_exhausted = True
                return None
            stats.expanded += 1
            for child in self._expand(node, base):
                stats.generated += 1
                if math.isfinite(child.f):
                    heapq.heappush(frontier, (child.f, child.g, child.ends, next(tie), child))
        return None

    def _expand(self, node: SearchNode, h: str):
        ia, ib = node.ends
        moves_a = [(None, 0.0)] + list(self.g.adjacency[ia])
        moves_b = [(None, 0.0)] + list(self.g.adjacency[ib])
        for va, wa in moves_a:
            for vb, wb in moves_b:
                if va is None and vb is None:
                    continue
                ends = (ia if va is None else va, ib if vb is None else vb)
                ca, cb = node.cost_a + wa, node.cost_b + wb
                f = max(node.f, self.priority(h, *ends, ca, cb))
                yield SearchNode(None, ca, cb, node, f, (), ends, (va, vb))

    def _refine_jr(self, node: SearchNode, ell: float) -> None:
        """Raise node.f to the optimum of a relaxed problem with a longer cable."""
        node.jr_done = True
        if self.is_goal(node, ell):
            return
        k = max(len(node.cable.verts) - 2, 0)  # a collapsed cable has one vertex
        relaxed = ell * (1 + k)
        ck = (node.key, node.cost_a, node.cost_b, relaxed)
        if ck not in self.jr_cache:
            budget = self.opts.jr_budget if self.opts.jr_budget is not None else 10 * len(self.g)
            sub = SearchStats()
            root = self.make_root(node.cable, node.cost_a, node.cost_b, "spd")
            found = self.run(root, relaxed, "spd", budget, sub)
            if found is not None:
                self.jr_cache[ck] = found.g
            elif sub.budget_exhausted:
                self.jr_cache[ck] = None
            else:
                self.jr_cache[ck] = math.inf
        value = self.jr_cache[ck]
        if value is not None:
            node.f = max(node.f, value)


def heuristic_jr(node: SearchNode, s: Scenario, search: _Search | None = None) -> float:
    """Relaxed sub-solve value minus the node's cost; SPD when over budget."""
    search = search or _Search(s, build_rvg(s), PlanOptions())
    probe = search.make_root(node.cable, node.cost_a, node.cost_b, "spd")
    search._refine_jr(probe, s.ell)
    return probe.f - probe.g


def _chain(goal: SearchNode) -> list[SearchNode]:
    out = []
    n = goal
    while n is not None:
        out.append(n)
        n = n.parent
    return out[::-1]


def extract_solution(goal: SearchNode) -> Solution:
    chain = _chain(goal)
    pi_a = tuple(n.cable.first for n in chain)
    pi_b = tuple(n.cable.last for n in chain)
    steps = tuple((n.cable.first, n.cable.last, n.cable) for n in chain)
    return Solution(pi_a, pi_b, goal.cost_a, goal.cost_b, goal.cable, steps)


def _tautened(sol: Solution, search: _Search) -> Solution:
    """Shortest homotopic versions of both paths, padded to equal length.

    The final cable depends only on the homotopy classes of the paths, so it
    is unchanged, and taut paths are what the convexity argument needs.
    """
    ta = search.tt.tighten(list(sol.pi_a)).verts
    tb = search.tt.tighten(list(sol.pi_b)).verts
    n = max(len(ta), len(tb))
    pa = ta + (ta[-1],) * (n - len(ta))
    pb = tb + (tb[-1],) * (n - len(tb))
    ca, cb = polyline_length(ta), polyline_length(tb)
    return Solution(pa, pb, ca, cb, sol.final_cable, sol.steps)


def plan(s: Scenario, h: str = "spd", opts: PlanOptions | None = None,
         graph: VisGraph | None = None) -> tuple[Solution | Infeasible, SearchStats]:
    if h not in HEURISTICS:
        raise ValueError(f"unknown heuristic {h!r}; expected one of {', '.join(HEURISTICS)}")
    opts = opts or PlanOptions()
    t0 = time.perf_counter()
    g = graph or build_rvg(s)
    search = _Search(s, g, opts)
    stats = SearchStats()
    root = search.make_root(search.tt.tighten(list(s.c0)), 0.0, 0.0, "spd" if h == "jr" else h)
    goal = search.run(root, s.ell, h, opts.max_expansions, stats)
    if goal is None:
        stats.wall_time = time.perf_counter() - t0
        reason = "expansion budget exhausted" if stats.budget_exhausted else "no solution"
        return Infeasible(reason), stats
    sol = extract_solution(goal)
    if opts.tauten:
        sol = _tautened(sol, search)
    stats.wall_time = time.perf_counter() - t0
    return sol, stats
