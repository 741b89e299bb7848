import math

import pytest

from tetherpair.cable import TautCable, cstar_upper, tighten
from tetherpair.geom import Point, dist
from tetherpair.planner import (
    HEURISTICS,
    Infeasible,
    PlanOptions,
    SearchNode,
    SearchStats,
    Solution,
    _Search,
    extract_solution,
    heuristic_jr,
    heuristic_sld,
    heuristic_spd,
    plan,
)
from tetherpair.scenario import Scenario, load_scenario
from tetherpair.visgraph import build_rvg, shortest_dists_from

from conftest import fixture_path
from scenario_gen import random_scenario

P = Point


def _node(cable, ca=0.0, cb=0.0):
    return SearchNode(TautCable.of(cable), ca, cb)


def _spd_precomp(s):
    g = build_rvg(s)
    return (shortest_dists_from(g, g.terminals["d_a"]), shortest_dists_from(g, g.terminals["d_b"]),
            {v: i for i, v in enumerate(g.vertices)})


def test_parallel_translation():
    s = load_scenario(fixture_path("parallel"))
    sol, stats = plan(s)
    assert (sol.cost_a, sol.cost_b) == pytest.approx((1, 1), abs=1e-9)
    assert sol.max_cost == pytest.approx(1, abs=1e-9)
    assert sol.final_cable.verts == (P(0, 1), P(1, 1))
    assert stats.expanded <= stats.generated


def test_separation_is_infeasible():
    sol, _ = plan(load_scenario(fixture_path("separation")))
    assert isinstance(sol, Infeasible)
    assert sol.max_cost == math.inf


def test_square_fixture(square):
    for h in HEURISTICS:
        sol, _ = plan(square, h)
        assert (sol.cost_a, sol.cost_b) == pytest.approx((3, 3), abs=1e-9)
        assert sol.final_cable.verts == (P(0, 3), P(1, 1), P(2, 1), P(3, 3))
        assert sol.pi_a[0] == square.r_a and sol.pi_a[-1] == square.d_a
        assert sol.pi_b[0] == square.r_b and sol.pi_b[-1] == square.d_b
        assert len(sol.pi_a) == len(sol.pi_b)


def test_no_prune_gives_same_cost(square):
    a, _ = plan(square, "spd", PlanOptions(prune=False))
    b, _ = plan(square, "spd")
    assert a.max_cost == pytest.approx(b.max_cost, abs=1e-9)


def test_unknown_heuristic(square):
    with pytest.raises(ValueError):
        plan(square, "manhattan")


def test_budget_exhausted(square):
    sol, stats = plan(square.with_ell(4.5), "none", PlanOptions(max_expansions=1))
    assert isinstance(sol, Infeasible)
    assert stats.budget_exhausted and "budget" in sol.reason


def test_sld_examples(square):
    s = load_scenario(fixture_path("parallel"))
    assert heuristic_sld(_node([(0, 1), (1, 1)]), s) == 0
    s = Scenario((), P(0, 0), P(1, 0), P(3, 0), P(1, 4), 9.0, (P(0, 0), P(1, 0)))
    assert heuristic_sld(_node([(0, 0), (1, 0)]), s) == 4
    assert heuristic_sld(_node([(0, 0), (3, 0)]), square) == 3


def test_spd_examples(square):
    empty = Scenario((), P(0, 0), P(1, 0), P(3, 4), P(1, 4), 9.0, (P(0, 0), P(1, 0)))
    node = _node([(0, 0), (1, 0)])
    assert heuristic_spd(node, empty, _spd_precomp(empty)) == pytest.approx(heuristic_sld(node, empty))
    assert heuristic_spd(_node([(0, 3), (3, 3)]), square, _spd_precomp(square)) == 0
    behind = Scenario(square.obstacles, P(0, 0), P(3, 0), P(3, 3), P(3, 3.5), 8.0, (P(0, 0), P(3, 0)))
    spd = heuristic_spd(_node([(0, 0), (3, 0)]), behind, _spd_precomp(behind))
    assert spd == pytest.approx(2 * math.sqrt(5))
    assert spd > heuristic_sld(_node([(0, 0), (3, 0)]), behind)


def test_jr_examples(square):
    s = load_scenario(fixture_path("parallel"))
    assert heuristic_jr(_node([(0, 1), (1, 1)]), s) == 0
    search = _Search(s, build_rvg(s), PlanOptions())
    root = _node([(0, 0), (1, 0)])
    assert heuristic_jr(root, s, search) == pytest.approx(heuristic_spd(root, s, _spd_precomp(s)))
    root = _node([(0, 0), (3, 0)])
    assert heuristic_jr(root, square) >= heuristic_spd(root, square, _spd_precomp(square)) - 1e-9


def test_extract_solution_examples():
    s = Scenario((), P(0, 0), P(1, 0), P(0, 0), P(1, 0), 2.0, (P(0, 0), P(1, 0)))
    sol, _ = plan(s)
    assert sol.pi_a == (P(0, 0),) and sol.pi_b == (P(1, 0),)
    assert (sol.cost_a, sol.cost_b) == (0, 0)
    root = _node([(0, 0), (1, 0)])
    goal = SearchNode(TautCable.of([(0, 1), (1, 1)]), 1.0, 1.0, root)
    sol = extract_solution(goal)
    assert sol.pi_a == (P(0, 0), P(0, 1)) and sol.pi_b == (P(1, 0), P(1, 1))
    assert sol.final_cable is goal.cable


def test_monotone_in_ell(square):
    wall = load_scenario(fixture_path("wall"))
    for s, lengths in ((square, [3.5, 4.5, 5.5, 6, 8]), (wall, [7, 8, 9, 11, 12, 14])):
        costs = [plan(s.with_ell(ell))[0].max_cost for ell in lengths]
        assert all(b <= a + 1e-9 for a, b in zip(costs, costs[1:]))


@pytest.mark.parametrize("seed", range(8))
def test_soundness_random(seed):
    s = random_scenario(seed)
    sol, _ = plan(s)
    assert isinstance(sol, Solution)
    assert cstar_upper(sol.pi_a, sol.pi_b, s.c0, s.obstacles) <= s.ell + 1e-6
    assert sol.pi_a[0] == s.r_a and sol.pi_a[-1] == s.d_a
    assert sol.pi_b[0] == s.r_b and sol.pi_b[-1] == s.d_b
    final = tighten(list(reversed(sol.pi_a)) + list(s.c0) + list(sol.pi_b), s.obstacles)
    assert final == sol.final_cable


@pytest.mark.parametrize("seed", range(5))
def test_heuristic_dominance_at_expanded_nodes(seed):
    """none <= sld <= spd <= jr <= true optimum, in priority space."""
    s = random_scenario(seed)
    search = _Search(s, build_rvg(s), PlanOptions())
    seen = []
    expand = search._expand

    def spy(node, h):
        if len(seen) < 10:
            seen.append(node)
        return expand(node, h)

    search._expand = spy
    root = search.make_root(tighten(list(s.c0), s.obstacles), 0.0, 0.0, "none")
    search.run(root, s.ell, "none", 10_000, SearchStats())
    search._expand = expand
    assert seen
    for node in seen:
        f = [search.priority(h, *node.ends, node.cost_a, node.cost_b) for h in ("none", "sld", "spd")]
        f.append(node.g + heuristic_jr(node, s, search))
        sub = _Search(s, search.g, PlanOptions())
        best = sub.run(sub.make_root(node.cable, node.cost_a, node.cost_b, "none"), s.ell, "none", 50_000,
                       SearchStats())
        true = best.g if best is not None else math.inf
        assert f[0] <= f[1] + 1e-9 <= f[2] + 2e-9 <= f[3] + 3e-9 <= true + 4e-9


@pytest.mark.parametrize("seed", range(5))
def test_priorities_never_decrease_along_chain(seed):
    s = random_scenario(seed)
    for h in ("none", "sld", "spd"):
        search = _Search(s, build_rvg(s), PlanOptions())
        root = search.make_root(tighten(list(s.c0), s.obstacles), 0.0, 0.0, h)
        goal = search.run(root, s.ell, h, 100_000, SearchStats())
        chain = []
        while goal is not None:
            chain.append(goal)
            goal = goal.parent
        fs = [n.f for n in reversed(chain)]
        assert all(b >= a - 1e-9 for a, b in zip(fs, fs[1:]))


def test_tautened_paths_keep_final_cable(square):
    raw, _ = plan(square, "spd", PlanOptions(tauten=False))
    taut, _ = plan(square, "spd")
    assert raw.final_cable == taut.final_cable
    assert taut.max_cost <= raw.max_cost + 1e-9
    assert dist(taut.pi_a[-1], square.d_a) == 0
