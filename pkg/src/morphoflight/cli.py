"""Command-line entry point: ``morphoflight run | check | sweep``."""
from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import fields, replace
from pathlib import Path

import yaml

from .acceptance import AcceptanceSuite, all_primary_pass, format_report
from .dynamics import RobotParams
from .errors import MorphoflightError, NoTouchdown, ParseError, UnknownParameter
from .ground_effect import load_table
from .params import load_params
from .plots import landing_panels
from .sim import NMPC, PID, SCENARIO_FIELDS, load_scenario, metrics, read_log, run, shipped_scenario_path
from .sim.metrics import _atomic_write, summary, write_log, write_summary

# wall-clock measurements are kept out of written files so outputs are byte-reproducible
_TIMING_KEYS = ("mpc_step_mean_s",)

SWEEP_COLUMNS = ("value", "touchdown", "tipover", "phi_g_deg", "impact_speed", "max_mean_thrust",
                 "lateral_drift", "distance_driven")


def _scenario_path(arg: str) -> Path:
    p = Path(arg)
    if p.exists() or p.suffix:
        return p
    return shipped_scenario_path(arg)  # bare name of a shipped scenario


def _load_inputs(args):
    scn = load_scenario(_scenario_path(args.scenario))
    params = load_params(args.params) if args.params else RobotParams()
    changes = {"seed": args.seed}
    if args.ground_effect is not None:
        changes["ground_effect"] = args.ground_effect == "on"
    if args.noise is not None:
        changes["measurement_noise"] = args.noise
    if args.preset is not None:
        changes["preset"] = args.preset
    scn = scn.with_(**changes)
    table = load_table(args.ge_table) if scn.ground_effect else None
    return scn, params, table


def _run_summary(log) -> dict:
    try:
        _, out = metrics(log)
    except NoTouchdown:
        out = summary(log)
    for k in _TIMING_KEYS:
        out.pop(k, None)
    return out


def cmd_run(args) -> int:
    scn, params, table = _load_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log = run(scn, args.controller, params=params, table=table)
    write_log(log, out / "run.csv")
    info = _run_summary(log)
    write_summary(info, out / "summary.json")
    # plots come from the CSV on disk, not from in-memory state
    for stem, svg in landing_panels(read_log(out / "run.csv")).items():
        _atomic_write(out / f"{stem}.svg", svg)
    td = info.get("touchdown")
    if td:
        print(f"touchdown t={td['t']:.3f} s phi_g={td['phi_g']:.2f} deg impact={td['impact_speed']:.3f} m/s")
    elif log.tipover:
        print(f"tipover: {log.tipover}")
    print(f"wrote {out}")
    return 0


def cmd_check(args) -> int:
    params = load_params(args.params) if args.params else RobotParams()
    table, table_error = None, None
    try:
        table = load_table(args.ge_table)
    except ParseError as exc:
        table_error = str(exc)
    suite = AcceptanceSuite(params=params, table=table, table_error=table_error)
    results = suite.run_all()
    report = format_report(results)
    print(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _atomic_write(out / "check.txt", report + "\n")
    return 0 if all_primary_pass(results) else 1


def _parse_values(raw: list[str]) -> list:
    vals = []
    for r in raw:
        for piece in r.split(","):
            if piece.strip():
                vals.append(yaml.safe_load(piece))
    return vals


def cmd_sweep(args) -> int:
    robot_keys = {f.name for f in fields(RobotParams)}
    if args.param not in SCENARIO_FIELDS and args.param not in robot_keys:
        raise UnknownParameter(f"unknown sweep parameter {args.param!r}")
    values = _parse_values(args.values or [])
    if not values:
        print("no values; nothing to do")
        return 0
    base, params, table = _load_inputs(args)
    rows = []
    for v in values:
        scn, prm = base, params
        if args.param in SCENARIO_FIELDS:
            scn = base.with_(**{args.param: v})
        else:
            try:
                prm = replace(params, **{args.param: float(v)})
            except (TypeError, ValueError) as exc:
                raise ParseError(f"invalid value {v!r} for {args.param}: {exc}") from exc
        tbl = table if scn.ground_effect else None
        if scn.ground_effect and tbl is None:
            tbl = load_table(args.ge_table)
        log = run(scn, args.controller, params=prm, table=tbl)
        info = _run_summary(log)
        td = info.get("touchdown") or {}
        rows.append((v, log.touchdown is not None, log.tipover or "", td.get("phi_g"), td.get("impact_speed"),
                     td.get("max_mean_thrust"), td.get("lateral_drift"), info.get("distance_driven")))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(["" if c is None else (f"{c:.6g}" if isinstance(c, float) else c) for c in r])
    text = buf.getvalue()
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _atomic_write(out / f"sweep_{args.param}.csv", text)
    return 0


def _add_inputs(p):
    p.add_argument("--scenario", default="wheel_landing", help="scenario YAML path or shipped scenario name")
    p.add_argument("--params", default=None, help="robot parameter YAML (default: shipped)")
    p.add_argument("--ge-table", default=None, help="ground-effect table CSV (default: shipped)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ground-effect", choices=("on", "off"), default=None)
    p.add_argument("--noise", type=float, default=None, help="position noise std [m]")
    p.add_argument("--controller", choices=(NMPC, PID), default=NMPC)
    p.add_argument("--preset", choices=("fig5", "retuned"), default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morphoflight", description="Aerial-ground landing simulator.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and write CSV, summary and plots")
    _add_inputs(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="run the acceptance suite")
    p.add_argument("--params", default=None)
    p.add_argument("--ge-table", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="run a scenario once per parameter value")
    _add_inputs(p)
    p.add_argument("--param", required=True, help="scenario or robot parameter name")
    p.add_argument("--values", nargs="*", default=[], help="values, space or comma separated")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MorphoflightError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
