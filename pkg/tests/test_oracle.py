import math

import pytest

from tetherpair.cable import TautCable
from tetherpair.geom import INTERIOR, Point, Polygon, point_in_polygon
from tetherpair.oracle import (
    Unreachable,
    exhaustive_pair_search,
    grid_shortest_path,
    matches_fol,
    rubber_band_tighten,
    segment_profile,
    winding_number_classify,
)
from tetherpair.planner import Solution
from tetherpair.scenario import Scenario, load_scenario

from conftest import fixture_path

P = Point
SQUARE = [Polygon.from_coords([(1, 1), (2, 1), (2, 2), (1, 2)])]


def _empty(ra, rb, da, db, ell):
    return Scenario((), P(*ra), P(*rb), P(*da), P(*db), float(ell), (P(*ra), P(*rb)))


def test_grid_examples(square):
    empty = _empty((0, 0), (1, 0), (0, 1), (1, 1), 2)
    assert grid_shortest_path(P(0, 0), P(3, 4), empty) == pytest.approx(5, rel=0.01)
    assert grid_shortest_path(P(0, 0), P(3, 3), square) == pytest.approx(2 * math.sqrt(5), rel=0.01)
    assert grid_shortest_path(P(2, 2), P(2, 2), square) == 0.0


def test_grid_is_an_upper_bound(square):
    d = grid_shortest_path(P(1.5, 0.5), P(1.5, 2.5), square)
    assert d >= 1 + math.sqrt(0.5) * 2 - 1e-9


def test_grid_unreachable():
    # overlapping walls: touching ones would leave a free seam between them
    walled = Scenario(
        (
            Polygon.from_coords([(0, 0), (4, 0), (4, 1), (0, 1)]),
            Polygon.from_coords([(0, 3), (4, 3), (4, 4), (0, 4)]),
            Polygon.from_coords([(0, 0.5), (1, 0.5), (1, 3.5), (0, 3.5)]),
            Polygon.from_coords([(3, 0.5), (4, 0.5), (4, 3.5), (3, 3.5)]),
        ),
        P(5, 5), P(6, 5), P(5, 6), P(6, 6), 3.0, (P(5, 5), P(6, 5)))
    assert grid_shortest_path(P(5, 5), P(6, 6), walled) == pytest.approx(math.sqrt(2))
    with pytest.raises(Unreachable):
        grid_shortest_path(P(2, 2), P(5, 5), walled, resolution=0.1)


def test_rubber_band_examples():
    assert rubber_band_tighten([(0, 0), (0, 3), (3, 3)], SQUARE) == [P(0, 0), P(1, 2), P(3, 3)]
    assert rubber_band_tighten([(0, 3), (0, 0), (3, 0), (3, 3)], SQUARE) == [P(0, 3), P(1, 1), P(2, 1), P(3, 3)]
    assert rubber_band_tighten([(0, 0), (5, 1), (3, 0)], []) == [P(0, 0), P(3, 0)]
    assert rubber_band_tighten([(0, 0), (3, 0)], SQUARE) == [P(0, 0), P(3, 0)]


def test_exhaustive_examples(square):
    par = exhaustive_pair_search(load_scenario(fixture_path("parallel")))
    assert par.cost == pytest.approx(1, abs=1e-9)
    assert (par.cost_a, par.cost_b) == pytest.approx((1, 1))
    sq = exhaustive_pair_search(square, 4)
    assert sq.cost == pytest.approx(3, abs=1e-9)
    assert sq.pi_a[0] == square.r_a and sq.pi_a[-1] == square.d_a
    assert not exhaustive_pair_search(load_scenario(fixture_path("separation"))).feasible
    rec = exhaustive_pair_search(load_scenario(fixture_path("recession")))
    assert (rec.cost_a, rec.cost_b) == pytest.approx((0, 4))


def test_exhaustive_short_cable_forces_detour(square):
    # going straight up leaves 2 sqrt5 + 1 of cable wrapped under the square
    s = square.with_ell(4.5)
    res = exhaustive_pair_search(s, 4)
    assert res.feasible
    assert res.cost > 3 + 1e-6


def test_exhaustive_rejects_deep_searches(square):
    with pytest.raises(ValueError):
        exhaustive_pair_search(square, 7)


def _sol(pa, pb, cable):
    pa = tuple(P(*p) for p in pa)
    pb = tuple(P(*p) for p in pb)
    return Solution(pa, pb, 0.0, 0.0, TautCable.of(cable))


def test_segment_profile_letters():
    s = _empty((0, 0), (4, 0), (2, 0), (4, 0), 5)
    follow = _sol([(0, 0), (2, 0)], [(4, 0), (4, 0)], [(2, 0), (4, 0)])
    assert segment_profile(follow, s) == ("F", "")
    s = _empty((0, 0), (4, 0), (-2, 0), (4, 0), 7)
    lead = _sol([(0, 0), (-2, 0)], [(4, 0), (4, 0)], [(-2, 0), (4, 0)])
    assert segment_profile(lead, s) == ("L", "")
    s = _empty((0, 0), (4, 0), (0, 3), (4, 0), 7)
    side = _sol([(0, 0), (0, 3)], [(4, 0), (4, 0)], [(0, 3), (4, 0)])
    assert segment_profile(side, s) == ("O", "")
    assert segment_profile(side, s, mode="steps") == ("O", "")
    with pytest.raises(ValueError):
        segment_profile(side, s, mode="nope")


def test_fol_regex():
    for ok in ("", "F", "FFOL", "OOL", "LL", "FL"):
        assert matches_fol(ok)
    for bad in ("LF", "OF", "LO", "FOLF"):
        assert not matches_fol(bad)


def test_winding_number_agrees_with_point_in_polygon():
    poly = Polygon.from_coords([(0, 0), (4, 0), (4, 3), (2, 1), (0, 3)])
    for x in range(-1, 6):
        for y in range(-1, 5):
            p = P(x * 0.5 + 0.25, y * 0.7)
            assert (winding_number_classify(p, poly) == INTERIOR) == (point_in_polygon(p, poly) == INTERIOR)
    assert winding_number_classify(P(2, 0), poly) == "boundary"
