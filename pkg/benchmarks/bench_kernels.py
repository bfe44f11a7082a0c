"""Compare the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 200]

Kernel timings call both implementations in-process; the closed-loop
``mpc_step`` timing runs once per backend in a subprocess so the
``MORPHOFLIGHT_DISABLE_NUMBA`` flag takes effect.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from morphoflight import _kernels
from morphoflight._accel import use_numba
from morphoflight.dynamics import RobotParams, hover_input, model_frame

MPC_SNIPPET = """
import time
import numpy as np
from morphoflight.dynamics import RobotParams
from morphoflight.nmpc import NmpcController, OcpConfig
p = RobotParams()
c = NmpcController(p, OcpConfig())
x = np.zeros(12); x[0] = 0.2
c.step(x, np.zeros(12), 0.5)
t0 = time.perf_counter()
for _ in range(200):
    c.step(x, np.zeros(12), 0.5)
print((time.perf_counter() - t0) / 200)
"""


def _time(fn, repeat):
    fn()  # compile / warm caches
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(repeat: int):
    p = RobotParams()
    frame = model_frame(0.7, p)
    rng = np.random.default_rng(0)
    X = rng.normal(scale=0.2, size=(11, 12))
    U = np.clip(hover_input(0.7, p) + rng.normal(scale=0.05, size=(10, 4)), 0, 1)
    cases = {
        "eom": lambda m: m.eom(X[0], U[0], frame, 1.0),
        "rk4": lambda m: m.rk4(X[0], U[0], frame, 1.0, 0.1),
        "rollout N=10": lambda m: m.rollout(X[0], U, frame, 1.0, 0.1),
        "shoot N=10": lambda m: m.shoot(X, U, frame, 1.0, 0.1),
        "discrete_jac N=10": lambda m: m.discrete_jac(X, U, frame, 1.0, 0.1),
    }
    rows = []
    for name, call in cases.items():
        t_np = _time(lambda: call(_kernels.numpy_impl), repeat)
        t_nb = _time(lambda: call(_kernels.numba_impl), repeat) if use_numba() else float("nan")
        rows.append((name, t_nb, t_np))
    return rows


def mpc_step_time(disable: bool) -> float:
    env = dict(os.environ, MORPHOFLIGHT_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", MPC_SNIPPET], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    print(f"{'kernel':<20}{'numba [us]':>12}{'numpy [us]':>12}{'speedup':>10}")
    for name, t_nb, t_np in kernel_table(args.repeat):
        print(f"{name:<20}{t_nb * 1e6:>12.1f}{t_np * 1e6:>12.1f}{t_np / t_nb:>10.1f}")
    nb, nu = mpc_step_time(False), mpc_step_time(True)
    print(f"{'mpc_step':<20}{nb * 1e6:>12.1f}{nu * 1e6:>12.1f}{nu / nb:>10.1f}")


if __name__ == "__main__":
    main()
