import csv
import io
import json

import pytest

from tetherpair.cli import main

from conftest import fixture_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_exit_codes(capsys, tmp_path):
    assert run(capsys, "validate", "--scenario", fixture_path("square"))[0] == 0
    code, _, err = run(capsys, "validate", "--scenario", fixture_path("cable_too_long"))
    assert code == 1 and "CABLE_TOO_LONG" in err
    assert run(capsys, "validate", "--scenario", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", "--scenario", bad)[0] == 2


def test_plan_parallel(capsys):
    code, out, _ = run(capsys, "plan", "--scenario", fixture_path("parallel"))
    doc = json.loads(out)
    assert code == 0
    assert (doc["cost_a"], doc["cost_b"]) == (1.0, 1.0)
    assert doc["final_cable"] == [[0.0, 1.0], [1.0, 1.0]]
    assert set(doc["stats"]) >= {"expanded", "generated", "wall_time_s", "consumed_final"}


def test_plan_square_matches_oracle(capsys):
    from tetherpair.oracle import exhaustive_pair_search
    from tetherpair.scenario import load_scenario

    code, out, _ = run(capsys, "plan", "--scenario", fixture_path("square"), "--heuristic", "sld")
    doc = json.loads(out)
    best = exhaustive_pair_search(load_scenario(fixture_path("square")), 4)
    assert code == 0
    assert max(doc["cost_a"], doc["cost_b"]) == pytest.approx(best.cost, abs=1e-9)


def test_plan_infeasible_still_writes_stats(capsys, tmp_path):
    out_file = tmp_path / "sol.json"
    code, _, err = run(capsys, "plan", "--scenario", fixture_path("separation"), "--out", out_file)
    assert code == 3 and "infeasible" in err
    doc = json.loads(out_file.read_text())
    assert doc["feasible"] is False and doc["stats"]["expanded"] >= 1


def test_plan_ell_override(capsys):
    code, out, _ = run(capsys, "plan", "--scenario", fixture_path("recession"), "--ell", "2")
    assert code == 3
    code, _, _ = run(capsys, "plan", "--scenario", fixture_path("square"), "--ell", "-1")
    assert code == 1


def test_plan_output_is_deterministic(capsys, tmp_path):
    args = ["plan", "--scenario", fixture_path("wall"), "--no-timing", "--csv"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    _, out1, _ = run(capsys, *args, a)
    _, out2, _ = run(capsys, *args, b)
    assert out1 == out2
    assert a.read_bytes() == b.read_bytes()
    assert "wall_time_s" not in out1


def test_plan_writes_svg_and_csv(capsys, tmp_path):
    svg, trace = tmp_path / "s.svg", tmp_path / "t.csv"
    code, _, _ = run(capsys, "plan", "--scenario", fixture_path("square"), "--svg", svg, "--csv", trace,
                     "--samples", 20, "--speed", 2)
    assert code == 0
    text = svg.read_text()
    for color in ("#9e9e9e", "#d62728", "#1f77b4", "#2ca02c", "#8b0000"):
        assert color in text
    rows = list(csv.reader(io.StringIO(trace.read_text())))
    assert rows[0] == ["t", "x_a", "y_a", "x_b", "y_b"] and len(rows) == 22
    assert float(rows[-1][0]) == pytest.approx(1.5)


def test_samples_floor(capsys):
    assert run(capsys, "plan", "--scenario", fixture_path("square"), "--samples", 5)[0] == 1


def test_sweep(capsys):
    code, out, err = run(capsys, "sweep", "--scenario", fixture_path("square"), "--lengths", "8,2.5,4.5,6",
                         "--no-timing")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [float(r["ell"]) for r in rows] == [2.5, 4.5, 6, 8]
    assert rows[0]["status"] == "infeasible" and rows[0]["max_cost"] == "inf"
    costs = [float(r["max_cost"]) for r in rows]
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    assert "step in" in err


def test_sweep_range(capsys):
    code, out, _ = run(capsys, "sweep", "--scenario", fixture_path("parallel"), "--ell-min", 1, "--ell-max", 2,
                       "--count", 3)
    assert code == 0 and len(out.splitlines()) == 4
    assert run(capsys, "sweep", "--scenario", fixture_path("parallel"))[0] == 1


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--scenario", fixture_path("square"))
    rows = {r["heuristic"]: r for r in csv.DictReader(io.StringIO(out))}
    assert code == 0 and set(rows) == {"none", "sld", "spd", "jr"}
    assert len({r["max_cost"] for r in rows.values()}) == 1
    assert int(rows["sld"]["expanded"]) <= int(rows["none"]["expanded"])
    assert int(rows["spd"]["expanded"]) <= int(rows["sld"]["expanded"])


@pytest.fixture
def square_solution(capsys, tmp_path):
    path = tmp_path / "sol.json"
    assert run(capsys, "plan", "--scenario", fixture_path("square"), "--out", path)[0] == 0
    return path


def test_verify_passes_planner_output(capsys, square_solution):
    code, out, _ = run(capsys, "verify", "--scenario", fixture_path("square"), "--solution", square_solution)
    assert code == 0 and out.strip() == "PASS"


def test_verify_catches_long_cable(capsys, square_solution):
    doc = json.loads(square_solution.read_text())
    doc["final_cable"] = [[0, 3], [0, 9], [3, 9], [3, 3]]
    square_solution.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", "--scenario", fixture_path("square"), "--solution", square_solution)
    assert code == 1 and "FAIL C-II" in out


def test_verify_catches_endpoint_mismatch(capsys, square_solution):
    doc = json.loads(square_solution.read_text())
    doc["pi_a"][-1] = [0, 2.5]
    square_solution.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", "--scenario", fixture_path("square"), "--solution", square_solution)
    assert code == 1 and "FAIL goal" in out


def test_verify_io_errors(capsys, tmp_path):
    assert run(capsys, "verify", "--scenario", fixture_path("square"), "--solution", tmp_path / "x.json")[0] == 2
    junk = tmp_path / "junk.json"
    junk.write_text(json.dumps({"pi_a": []}))
    assert run(capsys, "verify", "--scenario", fixture_path("square"), "--solution", junk)[0] == 2


def test_render_and_graph(capsys, square_solution):
    code, out, _ = run(capsys, "render", "--scenario", fixture_path("square"), "--solution", square_solution)
    assert code == 0 and out.startswith("<svg") and "#8b0000" in out
    code, out, _ = run(capsys, "graph", "--scenario", fixture_path("square"))
    doc = json.loads(out)
    assert code == 0 and len(doc["vertices"]) == 8
    _, full, _ = run(capsys, "graph", "--scenario", fixture_path("square"), "--full")
    assert len(json.loads(full)["edges"]) >= len(doc["edges"])
