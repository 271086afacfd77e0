"""Command-line harness: simulate, verify, audit, counterexample, report.

Exit codes are stable across commands: 0 = pass, 1 = property violation
or failed audit, 2 = usage or input error.  All randomness flows from a
single --seed, which is recorded in every output file.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .errors import GeometryError, SolverError, UnsupportedSpaceError
from .metric import curve_length, diameter
from .objectives import make_objective
from .proximal import DEFAULT_SOLVER, discrete_gradient_curve
from .serialize import (
    SCHEMA_VERSION,
    bound_report_csv_rows,
    curve_from_json,
    curve_to_json,
    dumps,
    parse_bound_csv,
    parse_config_file,
    parse_point_spec,
    write_text_atomic,
)
from .spaces import parse_space_spec
from .spaces.base import Point
from .verify import CHECKS, DEFAULT_SAMPLING, SamplingConfig, run_checks
from .widths import (
    book_length_bound,
    euclidean_length_bound,
    generic_bound_for_curve,
    spider_jump_curve,
    tree_length_bound,
    unrectifiable_witness,
)

USAGE_ERROR = 2
VIOLATION = 1
OK = 0


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return USAGE_ERROR


def _merged_options(args) -> dict[str, str]:
    options: dict[str, str] = {}
    if getattr(args, "config", None):
        options.update(parse_config_file(args.config))
    for key in ("space", "objective", "tau", "steps", "seed", "out",
                "check", "bound", "tol", "start"):
        value = getattr(args, key, None)
        if value is not None:
            options[key] = str(value)
    return options


def _objective_params(space, options: dict[str, str]) -> dict:
    params = {}
    for key, value in options.items():
        if not key.startswith("objective."):
            continue
        name = key[len("objective."):]
        if name in ("target", "other"):
            params[name] = parse_point_spec(space, value)
        elif name in ("leg", "sheet"):
            params[name] = int(value)
        else:
            params[name] = float(value)
    return params


def _default_start(space, seed: int) -> Point:
    import numpy as np

    rng = np.random.default_rng(seed)
    return space.random_point(rng, scale=1.5)


def cmd_simulate(args) -> int:
    options = _merged_options(args)
    for required in ("space", "objective", "out"):
        if required not in options:
            return _fail(f"simulate needs --{required}")
    try:
        space = parse_space_spec(options["space"])
        params = _objective_params(space, options)
        objective = make_objective(space, options["objective"], **params)
    except (GeometryError, UnsupportedSpaceError, FileNotFoundError, ValueError) as e:
        return _fail(str(e))
    seed = int(options.get("seed", 0))
    steps = int(options.get("steps", 8))
    tau_text = options.get("tau", "0.5")
    taus = [float(t) for t in tau_text.split(",") if t.strip()]
    if len(taus) == 1:
        taus = taus * steps
    try:
        if "start" in options:
            start = parse_point_spec(space, options["start"])
        else:
            start = _default_start(space, seed)
        run = discrete_gradient_curve(objective, space, start, taus, DEFAULT_SOLVER)
    except (GeometryError, SolverError, UnsupportedSpaceError) as e:
        return _fail(str(e))
    out = Path(options["out"])
    write_text_atomic(out.with_suffix(".curve.json"),
                      dumps(curve_to_json(run.discrete_curve())))
    write_text_atomic(out.with_suffix(".interp.json"),
                      dumps(curve_to_json(run.interpolated_curve())))
    trace = ["k,t,f"]
    for k, (t, v) in enumerate(zip(run.times, run.values)):
        trace.append(f"{k},{t!r},{v!r}")
    write_text_atomic(out.with_suffix(".values.csv"), "\n".join(trace) + "\n")
    log = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "seed": seed,
        "space": options["space"],
        "objective": options["objective"],
        "tau": taus,
        "steps": steps,
        "n_points": len(run.points),
        "final_value": run.values[-1],
        "diagnostic": run.diagnostic,
    }
    write_text_atomic(out.with_suffix(".log.json"), dumps(log))
    print(f"simulated {len(run.points)} points; final value {run.values[-1]!r}")
    if run.diagnostic:
        print(f"diagnostic: {run.diagnostic}", file=sys.stderr)
        return VIOLATION
    return OK


def cmd_verify(args) -> int:
    options = _merged_options(args)
    try:
        doc = json.loads(Path(args.curve).read_text())
        curve = curve_from_json(doc)
    except (OSError, json.JSONDecodeError, GeometryError, KeyError, TypeError) as e:
        return _fail(f"cannot read curve file: {e}")
    names = [c.strip() for c in options.get("check", "self_contracted").split(",")
             if c.strip()]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        return _fail(f"unknown checks: {unknown}; available: {sorted(CHECKS)}")
    seed = int(options.get("seed", 0))
    tol = float(options.get("tol", DEFAULT_SAMPLING.tolerance))
    cfg = SamplingConfig(seed=seed, tolerance=tol)
    reports = run_checks(curve.space, curve, names, cfg)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "seed": seed,
        "curve_file": str(args.curve),
        "reports": [r.to_json() for r in reports],
        "passed": all(r.passed or r.informational for r in reports),
    }
    if "out" in options:
        write_text_atomic(options["out"], dumps(doc))
    for r in reports:
        print(f"{r.check}: {'PASS' if r.passed else 'FAIL'} "
              f"(max violation {r.max_violation!r}, n={r.n_checked})")
    return OK if doc["passed"] else VIOLATION


def cmd_audit(args) -> int:
    options = _merged_options(args)
    try:
        doc = json.loads(Path(args.curve).read_text())
        curve = curve_from_json(doc)
    except (OSError, json.JSONDecodeError, GeometryError, KeyError, TypeError) as e:
        return _fail(f"cannot read curve file: {e}")
    bound = options.get("bound")
    if not bound:
        return _fail("audit needs --bound (euclidean, tree, book, generic)")
    space = curve.space
    seed = int(options.get("seed", 0))
    try:
        if bound == "euclidean":
            report = euclidean_length_bound(curve, seed=seed)
        elif bound == "tree":
            report = tree_length_bound(space, curve)
        elif bound == "book":
            report = book_length_bound(space, curve)
        elif bound == "generic":
            report = generic_bound_for_curve(space, curve)
        else:
            return _fail(f"unknown bound {bound!r}")
    except (UnsupportedSpaceError, GeometryError) as e:
        return _fail(str(e))
    if "tol" in options:
        report = dataclasses.replace(report, tolerance=float(options["tol"]))
    if "out" in options:
        out = Path(options["out"])
        write_text_atomic(out.with_suffix(".json"),
                          dumps({"schema_version": SCHEMA_VERSION,
                                 "command": "audit", "seed": seed,
                                 "report": report.to_json()}))
        write_text_atomic(out.with_suffix(".csv"), bound_report_csv_rows([report]))
    print(f"{report.bound_name} bound on {report.space_desc}: "
          f"L={report.length!r} bound={report.bound!r} "
          f"ratio={report.ratio!r} {'PASS' if report.passed else 'FAIL'}")
    return OK if report.passed else VIOLATION


def cmd_counterexample(args) -> int:
    options = _merged_options(args)
    k = int(getattr(args, "k", None) or options.get("k", 0))
    if k < 2:
        return _fail("counterexample needs --k >= 2")
    out = Path(options.get("out", "counterexample"))
    rows = ["family,k,length,diam,ratio"]
    for kk in range(2, k + 1):
        curve, report = unrectifiable_witness(kk)
        ratio = report.constants["ratio_L_diam"]
        rows.append(f"orthonormal,{kk},{report.length!r},{report.diam!r},{ratio!r}")
        spider = spider_jump_curve(kk)
        sl = curve_length(spider)
        sd = diameter(spider.points)
        rows.append(f"spider,{kk},{sl!r},{sd!r},{(sl / sd)!r}")
        if kk == k:
            write_text_atomic(out.with_suffix(".orthonormal.json"),
                              dumps(curve_to_json(curve)))
            write_text_atomic(out.with_suffix(".spider.json"),
                              dumps(curve_to_json(spider)))
    write_text_atomic(out.with_suffix(".growth.csv"), "\n".join(rows) + "\n")
    print(f"emitted growth rows for k=2..{k} and curve files for k={k}")
    return OK


def cmd_report(args) -> int:
    paths = [Path(p) for p in args.rows]
    if not paths:
        return _fail("report needs at least one row file")
    bound_rows: list[dict] = []
    growth_rows: list[dict] = []
    for path in paths:
        try:
            text = path.read_text()
        except OSError as e:
            return _fail(str(e))
        header = text.splitlines()[0] if text.strip() else ""
        if header.startswith("family,"):
            for line in text.splitlines()[1:]:
                if not line.strip():
                    continue
                fam, kk, length, diam, ratio = line.split(",")
                growth_rows.append({"family": fam, "k": int(kk),
                                    "ratio": float(ratio)})
        else:
            bound_rows.extend(parse_bound_csv(text))
    if not bound_rows and not growth_rows:
        return _fail("no rows found in input files")
    out = Path(getattr(args, "out", None) or "report")
    all_pass = True
    lines = ["space,bound,n,n_passed,max_ratio,all_passed"]
    groups: dict[tuple[str, str], list[dict]] = {}
    for row in bound_rows:
        groups.setdefault((row["space"], row["bound"]), []).append(row)
    for (space, bound), rows in sorted(groups.items()):
        n = len(rows)
        n_passed = sum(1 for r in rows if r["passed"] == "1")
        max_ratio = max(float(r["ratio"]) for r in rows)
        ok = n_passed == n
        all_pass = all_pass and ok
        lines.append(f"{space},{bound},{n},{n_passed},{max_ratio!r},"
                     f"{'1' if ok else '0'}")
    write_text_atomic(out.with_suffix(".aggregate.csv"), "\n".join(lines) + "\n")
    if growth_rows:
        plot = ["family,k,ratio"]
        for row in sorted(growth_rows, key=lambda r: (r["family"], r["k"])):
            plot.append(f"{row['family']},{row['k']},{row['ratio']!r}")
        write_text_atomic(out.with_suffix(".plotdata.csv"), "\n".join(plot) + "\n")
    print(f"aggregated {len(bound_rows)} bound rows, "
          f"{len(growth_rows)} growth rows")
    return OK if all_pass else VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfcontract",
        description="Self-contracted curves: simulate, verify, audit, report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--seed", type=int, help="64-bit RNG seed")
        p.add_argument("--out", help="output path base")
        p.add_argument("--tol", type=float, help="violation tolerance")

    p = sub.add_parser("simulate", help="run a discrete gradient curve")
    common(p)
    p.add_argument("--space", help="space spec, e.g. euclidean:2 or spider:3")
    p.add_argument("--objective", help="catalog objective name")
    p.add_argument("--tau", help="step size (or comma list)")
    p.add_argument("--steps", type=int, help="number of resolvent steps")
    p.add_argument("--start", help="start point payload, comma separated")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="run property checks on a curve file")
    common(p)
    p.add_argument("curve", help="curve JSON file")
    p.add_argument("--check", help="comma list of checks")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("audit", help="audit a length bound on a curve file")
    common(p)
    p.add_argument("curve", help="curve JSON file")
    p.add_argument("--bound", help="euclidean | tree | book | generic")
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("counterexample",
                       help="emit the dimension-growth witness families")
    common(p)
    p.add_argument("--k", type=int, help="truncation size (>= 2)")
    p.set_defaults(fn=cmd_counterexample)

    p = sub.add_parser("report", help="aggregate audit rows and plot data")
    p.add_argument("rows", nargs="+", help="bound CSV / growth CSV files")
    p.add_argument("--out", help="output path base")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors already
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (GeometryError, UnsupportedSpaceError, SolverError) as e:
        return _fail(str(e))


if __name__ == "__main__":
    sys.exit(main())
