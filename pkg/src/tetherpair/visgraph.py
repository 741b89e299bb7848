"""Reduced visibility graph over obstacle vertices and the four terminals."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .geom import Point, dist, orientation, same_point, visible
from .scenario import Scenario

TERMINALS = ("r_a", "r_b", "d_a", "d_b")


@dataclass(frozen=True)
class VisGraph:
    vertices: tuple[Point, ...]
    adjacency: tuple[tuple[tuple[int, float], ...], ...]
    terminals: dict
    # (obstacle index, vertex index) per graph vertex, None for free terminals
    owner: tuple

    def __len__(self) -> int:
        return len(self.vertices)

    def index_of(self, p, eps: float = 1e-9) -> int | None:
        for i, v in enumerate(self.vertices):
            if same_point(v, p, eps):
                return i
        return None

    def edges(self):
        for i, nbrs in enumerate(self.adjacency):
            for j, w in nbrs:
                if i < j:
                    yield i, j, w

    def to_json(self) -> str:
        return json.dumps({
            "vertices": [[v.x, v.y] for v in self.vertices],
            "edges": [[i, j, w] for i, j, w in self.edges()],
            "terminals": self.terminals,
        })


def _tangent_at(s: Scenario, owner, p, q) -> bool:
    """The line through p (an obstacle vertex) and q does not cut p's obstacle."""
    if owner is None:
        return True
    k, i = owner
    prev, nxt = s.obstacles[k].neighbors(i)
    return orientation(p, q, prev) * orientation(p, q, nxt) >= 0


def build_rvg(s: Scenario, reduced: bool = True) -> VisGraph:
    verts: list[Point] = []
    owner: list = []
    for k, poly in enumerate(s.obstacles):
        for i, v in enumerate(poly.vertices):
            verts.append(v)
            owner.append((k, i))
    terminals = {}
    is_terminal = [False] * len(verts)
    for name, p in zip(TERMINALS, (s.r_a, s.r_b, s.d_a, s.d_b)):
        for i, v in enumerate(verts):
            if same_point(v, p):
                terminals[name] = i
                is_terminal[i] = True
                break
        else:
            verts.append(p)
            owner.append(None)
            is_terminal.append(True)
            terminals[name] = len(verts) - 1

    boundary = set()
    base = 0
    for poly in s.obstacles:
        n = len(poly)
        for i in range(n):
            boundary.add((base + i, base + (i + 1) % n))
            boundary.add((base + (i + 1) % n, base + i))
        base += n

    n = len(verts)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in boundary:
                keep = True
            elif not visible(verts[i], verts[j], s.obstacles):
                keep = False
            elif not reduced or is_terminal[i] or is_terminal[j]:
                keep = True
            else:
                keep = (_tangent_at(s, owner[i], verts[i], verts[j])
                        and _tangent_at(s, owner[j], verts[j], verts[i]))
            if keep:
                w = dist(verts[i], verts[j])
                adj[i].append((j, w))
                adj[j].append((i, w))
    return VisGraph(
        vertices=tuple(verts),
        adjacency=tuple(tuple(sorted(a)) for a in adj),
        terminals=terminals,
        owner=tuple(owner),
    )


def visible_verts(g: VisGraph, v: int) -> set[int]:
    return {j for j, _ in g.adjacency[v]}


def _matrix(g: VisGraph) -> csr_matrix:
    rows, cols, data = [], [], []
    for i, nbrs in enumerate(g.adjacency):
        for j, w in nbrs:
            rows.append(i)
            cols.append(j)
            # csgraph treats explicit zeros as missing edges
            data.append(max(w, 1e-300))
    n = len(g.vertices)
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def shortest_dists_from(g: VisGraph, v: int) -> dict[int, float]:
    """Exact single-source distances; unreachable vertices map to +inf."""
    d = dijkstra(_matrix(g), directed=False, indices=v)
    return {i: float(x) for i, x in enumerate(np.asarray(d))}
