"""Command line entry point: validate, plan, sweep, bench, verify, render, graph."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import oracle
from .cable import TautCable, cstar_upper, sampled_consumption, tighten
from .geom import as_point, dedupe, polyline_length, same_point, visible
from .planner import HEURISTICS, Infeasible, PlanOptions, Solution, plan
from .render import render_svg
from .scenario import ParseError, Scenario, ValidationError, load_scenario, validate
from .trajectory import make_execution, to_csv, verify_execution
from .visgraph import build_rvg

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_INFEASIBLE = 0, 1, 2, 3

log = logging.getLogger("tetherpair")


def fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.12g}"


def _round(obj):
    """Floats to 12 significant digits, recursively, for stable JSON."""
    if isinstance(obj, float):
        return obj if math.isinf(obj) or math.isnan(obj) else float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=1) + "\n"


def _load(path) -> Scenario:
    try:
        return load_scenario(path)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc
    except ParseError as exc:
        raise _Exit(EXIT_IO, str(exc)) from exc
    except ValidationError as exc:
        raise _Exit(EXIT_INVALID, "\n".join(f"{v.code}: {v.message}" for v in exc.violations)) from exc


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from exc


def _scenario_for(args) -> Scenario:
    s = _load(args.scenario)
    if getattr(args, "ell", None) is not None:
        s = s.with_ell(args.ell)
        problems = validate(s)
        if problems:
            raise _Exit(EXIT_INVALID, "\n".join(f"{v.code}: {v.message}" for v in problems))
    return s


def _stats_dict(stats, sol, timing: bool = True) -> dict:
    d = {"expanded": stats.expanded, "generated": stats.generated}
    if timing:
        d["wall_time_s"] = stats.wall_time
    if isinstance(sol, Solution):
        d.update(cost_a=sol.cost_a, cost_b=sol.cost_b, consumed_final=sol.final_cable.length)
    return d


# -- commands --------------------------------------------------------------

def cmd_validate(args) -> int:
    _load(args.scenario)
    print(f"{args.scenario}: valid")
    return EXIT_OK


def cmd_plan(args) -> int:
    s = _scenario_for(args)
    opts = PlanOptions(prune=not args.no_prune)
    sol, stats = plan(s, args.heuristic, opts)
    stats_d = _stats_dict(stats, sol, not args.no_timing)
    if isinstance(sol, Infeasible):
        doc = {"feasible": False, "reason": sol.reason, "stats": stats_d}
        code = EXIT_INFEASIBLE
    else:
        doc = {**sol.to_dict(), "stats": stats_d}
        code = EXIT_OK
    text = dumps(doc)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.svg:
        _write(args.svg, render_svg(s, sol if isinstance(sol, Solution) else None))
    if args.csv and isinstance(sol, Solution):
        tr_a, tr_b = make_execution(sol, args.speed)
        _write(args.csv, to_csv(tr_a, tr_b, args.samples, fmt=fmt))
    if code == EXIT_INFEASIBLE:
        print(f"infeasible: {sol.reason}", file=sys.stderr)
    return code


def _lengths(args) -> list[float]:
    if args.lengths:
        try:
            vals = [float(x) for x in args.lengths.split(",") if x.strip()]
        except ValueError as exc:
            raise _Exit(EXIT_INVALID, f"bad --lengths: {exc}") from exc
    else:
        lo, hi, n = args.ell_min, args.ell_max, args.count
        if lo is None or hi is None:
            raise _Exit(EXIT_INVALID, "give --lengths or both --ell-min and --ell-max")
        vals = [lo + (hi - lo) * i / max(n - 1, 1) for i in range(n)]
    return sorted(vals)


SWEEP_COLUMNS = ["ell", "cost_a", "cost_b", "max_cost", "consumed_final", "expanded", "generated", "wall_time", "status"]


def sweep(s: Scenario, lengths, heuristic: str = "spd", prune: bool = True) -> list[dict]:
    """One planner run per cable length, in increasing ell order."""
    rows = []
    for ell in sorted(lengths):
        sol, stats = plan(s.with_ell(ell), heuristic, PlanOptions(prune=prune))
        ok = isinstance(sol, Solution)
        rows.append({
            "ell": ell,
            "cost_a": sol.cost_a if ok else math.inf,
            "cost_b": sol.cost_b if ok else math.inf,
            "max_cost": sol.max_cost,
            "consumed_final": sol.final_cable.length if ok else math.inf,
            "expanded": stats.expanded,
            "generated": stats.generated,
            "wall_time": stats.wall_time,
            "status": "ok" if ok else "infeasible",
        })
    return rows


def find_steps(rows, tol: float = 1e-9) -> list[tuple[dict, dict]]:
    """Adjacent sweep rows across which the optimal max cost drops."""
    out = []
    for lo, hi in zip(rows, rows[1:]):
        if hi["max_cost"] < lo["max_cost"] - tol:
            out.append((lo, hi))
    return out


def _csv_text(rows, columns, timing=True) -> str:
    buf = io.StringIO()
    cols = [c for c in columns if timing or c != "wall_time"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([fmt(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    s = _load(args.scenario)
    lengths = _lengths(args)
    for ell in lengths:
        if ell <= 0:
            raise _Exit(EXIT_INVALID, f"cable length must be positive, got {ell}")
    rows = sweep(s, lengths, args.heuristic, not args.no_prune)
    text = _csv_text(rows, SWEEP_COLUMNS, not args.no_timing)
    if args.csv:
        _write(args.csv, text)
    else:
        sys.stdout.write(text)
    for lo, hi in find_steps(rows):
        print(f"step in ({fmt(lo['ell'])}, {fmt(hi['ell'])}]: max cost {fmt(lo['max_cost'])} -> "
              f"{fmt(hi['max_cost'])}, cable used {fmt(hi['consumed_final'])}", file=sys.stderr)
    return EXIT_OK


BENCH_COLUMNS = ["heuristic", "max_cost", "cost_a", "cost_b", "expanded", "generated", "wall_time"]


def cmd_bench(args) -> int:
    s = _scenario_for(args)
    rows = []
    for h in HEURISTICS:
        sol, stats = plan(s, h, PlanOptions(prune=not args.no_prune))
        ok = isinstance(sol, Solution)
        rows.append({
            "heuristic": h,
            "max_cost": sol.max_cost,
            "cost_a": sol.cost_a if ok else math.inf,
            "cost_b": sol.cost_b if ok else math.inf,
            "expanded": stats.expanded,
            "generated": stats.generated,
            "wall_time": stats.wall_time,
        })
    text = _csv_text(rows, BENCH_COLUMNS, not args.no_timing)
    if args.csv:
        _write(args.csv, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def solution_from_dict(d: dict) -> Solution:
    try:
        pa = tuple(as_point(p) for p in d["pi_a"])
        pb = tuple(as_point(p) for p in d["pi_b"])
        return Solution(pa, pb, float(d["cost_a"]), float(d["cost_b"]), TautCable.of(d["final_cable"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"bad solution data: {exc}") from exc


def verify_solution(s: Scenario, sol: Solution, samples: int = 200) -> list[str]:
    """Every check the solution fails; empty means it passes."""
    fails: list[str] = []
    obstacles = s.obstacles
    if not sol.pi_a or not sol.pi_b:
        return ["goal: empty path"]
    if not same_point(sol.pi_a[0], s.r_a) or not same_point(sol.pi_b[0], s.r_b):
        fails.append("start: paths must begin at ra and rb")
    if not same_point(sol.pi_a[-1], s.d_a) or not same_point(sol.pi_b[-1], s.d_b):
        fails.append("goal: paths must end at da and db")
    if len(sol.pi_a) != len(sol.pi_b):
        fails.append("shape: path vertex sequences differ in length")
    for label, path in (("a", sol.pi_a), ("b", sol.pi_b)):
        for p, q in zip(path, path[1:]):
            if not same_point(p, q) and not visible(p, q, obstacles):
                fails.append(f"C-I: robot {label} segment {tuple(p)}->{tuple(q)} enters an obstacle")
    for label, path, cost in (("a", sol.pi_a, sol.cost_a), ("b", sol.pi_b, sol.cost_b)):
        if abs(polyline_length(dedupe(path)) - cost) > 1e-6:
            fails.append(f"cost: robot {label} path length differs from cost_{label}")
    if fails:
        return fails
    c0 = list(s.c0)
    final = tighten(list(reversed(dedupe(sol.pi_a))) + c0 + dedupe(sol.pi_b), obstacles)
    if final.length > s.ell + 1e-6:
        fails.append(f"C-II: final cable needs {final.length:.9g} > ell={s.ell:.9g}")
    declared = sol.final_cable
    if declared.length > s.ell + 1e-6:
        fails.append(f"C-II: declared final cable length {declared.length:.9g} > ell={s.ell:.9g}")
    if len(declared.verts) != len(final.verts) or any(
            not same_point(p, q, 1e-6) for p, q in zip(declared.verts, final.verts)):
        fails.append("cable: declared final cable differs from the one the paths produce")
    need = cstar_upper(sol.pi_a, sol.pi_b, c0, obstacles, samples)
    if need > s.ell + 1e-6:
        fails.append(f"C-II: synchronized execution needs {need:.9g} > ell={s.ell:.9g}")
    lengths = [l for _, l in sampled_consumption(sol.pi_a, sol.pi_b, c0, obstacles, samples)]
    worst = min((lengths[i - 1] - 2 * lengths[i] + lengths[i + 1] for i in range(1, len(lengths) - 1)), default=0.0)
    if worst < -1e-6:
        fails.append(f"convexity: consumption second difference {worst:.3g}")
    tr_a, tr_b = make_execution(sol, 1.0)
    for v in verify_execution(tr_a, tr_b, s, samples).violations:
        fails.append(f"{v.condition}: t={v.time:.6g} {v.message}")
    for label, prof in zip("ab", oracle.segment_profile(sol, s)):
        if not oracle.matches_fol(prof):
            fails.append(f"structure: robot {label} segments {prof} are not of the form F*O*L*")
    return fails


def cmd_verify(args) -> int:
    s = _load(args.scenario)
    try:
        data = json.loads(Path(args.solution).read_text(encoding="utf-8"))
        sol = solution_from_dict(data)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {args.solution}: {exc.strerror or exc}") from exc
    except (json.JSONDecodeError, ParseError) as exc:
        raise _Exit(EXIT_IO, f"{args.solution}: {exc}") from exc
    fails = verify_solution(s, sol, args.samples)
    if fails:
        for f in fails:
            print(f"FAIL {f}")
        return EXIT_INVALID
    print("PASS")
    return EXIT_OK


def cmd_render(args) -> int:
    s = _load(args.scenario)
    sol = None
    if args.solution:
        try:
            sol = solution_from_dict(json.loads(Path(args.solution).read_text(encoding="utf-8")))
        except OSError as exc:
            raise _Exit(EXIT_IO, f"cannot read {args.solution}: {exc.strerror or exc}") from exc
        except (json.JSONDecodeError, ParseError) as exc:
            raise _Exit(EXIT_IO, f"{args.solution}: {exc}") from exc
    text = render_svg(s, sol)
    if args.svg:
        _write(args.svg, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_graph(args) -> int:
    s = _load(args.scenario)
    g = build_rvg(s, reduced=not args.full)
    doc = {
        "vertices": [list(v) for v in g.vertices],
        "edges": [[i, j, w] for i, j, w in g.edges()],
        "terminals": g.terminals,
    }
    text = dumps(doc)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tetherpair", description="Plan paths for two robots joined by a cable.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, ell=True):
        sp.add_argument("--scenario", required=True, help="scenario JSON file")
        if ell:
            sp.add_argument("--ell", type=float, help="override the cable length")

    def search(sp):
        sp.add_argument("--heuristic", choices=HEURISTICS, default="spd")
        sp.add_argument("--no-prune", action="store_true", help="check cable length at the goal only")
        sp.add_argument("--no-timing", action="store_true", help="omit wall times for reproducible output")

    sp = sub.add_parser("validate", help="check a scenario file")
    common(sp, ell=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("plan", help="find a distance optimal path pair")
    common(sp)
    search(sp)
    sp.add_argument("--out", help="solution JSON (default: stdout)")
    sp.add_argument("--svg", help="write a drawing of the solution")
    sp.add_argument("--csv", help="write the timed execution as CSV")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--speed", type=float, default=1.0, help="maximum robot speed for --csv")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("sweep", help="solve for a range of cable lengths")
    common(sp, ell=False)
    search(sp)
    sp.add_argument("--lengths", help="comma separated cable lengths")
    sp.add_argument("--ell-min", type=float)
    sp.add_argument("--ell-max", type=float)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--csv", help="output CSV (default: stdout)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bench", help="compare heuristics on one scenario")
    common(sp)
    search(sp)
    sp.add_argument("--csv", help="output CSV (default: stdout)")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("verify", help="check a solution file against a scenario")
    common(sp, ell=False)
    sp.add_argument("--solution", required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("render", help="draw a scenario and optional solution as SVG")
    common(sp, ell=False)
    sp.add_argument("--solution")
    sp.add_argument("--svg", help="output file (default: stdout)")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("graph", help="dump the visibility graph as JSON")
    common(sp, ell=False)
    sp.add_argument("--full", action="store_true", help="keep non-tangent edges")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "samples", 200) < 10:
        print("--samples must be at least 10", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except _Exit as exc:
        if exc.message:
            print(exc.message, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
