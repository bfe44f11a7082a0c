"""Touchdown metrics and log persistence."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict

import numpy as np

from ..errors import NoTouchdown, ParseError
from .contact import TouchdownMetrics
from .engine import CSV_COLUMNS, Event, SimLog


def landing_phase(log: SimLog, t_touchdown: float) -> slice:
    """Ticks from the last altitude apex up to (excluding) the touchdown tick."""
    end = int(np.searchsorted(log.t, t_touchdown - 1e-12))
    start = 0
    lift = [e.t for e in log.events if e.kind == "liftoff" and e.t < t_touchdown]
    if lift:
        start = int(np.searchsorted(log.t, lift[-1]))
    if end <= start:
        return slice(start, max(end, start))
    apex = start + int(np.argmax(log.x[start:end, 2]))
    return slice(apex, end)


def metrics(log: SimLog) -> tuple[TouchdownMetrics, dict]:
    """Touchdown metrics plus a summary dictionary; raises NoTouchdown if the run never grounded."""
    if log.touchdown is None:
        raise NoTouchdown(f"no touchdown (tipover: {log.tipover})" if log.tipover else "no touchdown")
    td = TouchdownMetrics(**asdict(log.touchdown))
    phase = landing_phase(log, td.t)
    ubar = log.mean_thrust
    td.max_mean_thrust = float(np.max(ubar[phase], initial=0.0))
    # drift: touchdown position against the apex advanced by the commanded horizontal velocity
    i0 = phase.start
    i1 = min(int(np.searchsorted(log.t, td.t)), log.t.size - 1)
    ref = log.x[i0, 0:2].copy()
    if log.v_cmd is not None and i1 > i0:
        dts = np.diff(log.t[i0 : i1 + 1])
        ref += (log.v_cmd[i0:i1, 0:2] * dts[:, None]).sum(axis=0)
    td.lateral_drift = float(np.hypot(*(log.x[i1, 0:2] - ref)))
    return td, summary(log, td)


def summary(log: SimLog, td: TouchdownMetrics | None = None) -> dict:
    out = dict(log.info)
    out["mode_sequence"] = log.mode_sequence()
    out["events"] = [{"t": round(e.t, 9), "kind": e.kind, "detail": e.detail} for e in log.events]
    out["tipover"] = log.tipover
    out["samples"] = int(log.t.size)
    out["max_mean_thrust_run"] = float(np.max(log.mean_thrust, initial=0.0))
    out["input_bound_violations"] = int(np.count_nonzero((log.u_a < 0.0) | (log.u_a > 1.0)))
    if td is not None:
        out["touchdown"] = asdict(td)
    return out


def _atomic_write(path, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def log_to_csv(log: SimLog) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in log.rows():
        w.writerow([r if isinstance(r, str) else repr(float(r)) for r in row])
    return buf.getvalue()


def write_log(log: SimLog, path):
    _atomic_write(path, log_to_csv(log))


def read_log(path) -> SimLog:
    """Load a CSV written by ``write_log`` (events and metrics are not stored in the CSV)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ParseError(f"{path}: unexpected CSV header")
    body = rows[1:]
    num = np.array([[float(v) for i, v in enumerate(r) if CSV_COLUMNS[i] != "mode"] for r in body]).reshape(-1, len(CSV_COLUMNS) - 1)
    mode = np.array([r[CSV_COLUMNS.index("mode")] for r in body], dtype=object)
    return SimLog(
        t=num[:, 0], x=num[:, 1:13], phi=num[:, 13], alpha=num[:, 14], u_a=num[:, 15:19],
        u_g=num[:, 19:21], mode=mode, ge_ratio=num[:, 21], events=[Event(0.0, "mode", str(mode[0]))] if len(mode) else [],
    )


def write_summary(summary_dict: dict, path):
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, np.generic):
            return v.item()
        return v

    _atomic_write(path, json.dumps(clean(summary_dict), indent=2, sort_keys=True) + "\n")
