import os
import subprocess
import sys

import numpy as np
import pytest

from morphoflight import _kernels
from morphoflight._accel import use_numba
from morphoflight.dynamics import hover_input, model_frame

needs_numba = pytest.mark.skipif(not use_numba(), reason="numba disabled")


@pytest.fixture
def problem(params):
    rng = np.random.default_rng(0)
    frame = model_frame(0.7, params)
    X = rng.normal(scale=0.2, size=(11, 12))
    U = np.clip(hover_input(0.7, params) + rng.normal(scale=0.05, size=(10, 4)), 0, 1)
    return frame, X, U


@needs_numba
def test_eom_and_rk4_agree(problem):
    frame, X, U = problem
    for k in range(10):
        np.testing.assert_allclose(_kernels.numba_impl.eom(X[k], U[k], frame, 1.1),
                                   _kernels.numpy_impl.eom(X[k], U[k], frame, 1.1), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(_kernels.numba_impl.rk4(X[k], U[k], frame, 1.1, 0.1),
                                   _kernels.numpy_impl.rk4(X[k], U[k], frame, 1.1, 0.1), rtol=1e-12, atol=1e-12)


@needs_numba
def test_rollout_and_shoot_agree(problem):
    frame, X, U = problem
    np.testing.assert_allclose(_kernels.numba_impl.rollout(X[0], U, frame, 1.0, 0.1),
                               _kernels.numpy_impl.rollout(X[0], U, frame, 1.0, 0.1), rtol=1e-11, atol=1e-12)
    np.testing.assert_allclose(_kernels.numba_impl.shoot(X, U, frame, 1.0, 0.1),
                               _kernels.numpy_impl.shoot(X, U, frame, 1.0, 0.1), rtol=1e-11, atol=1e-12)


@needs_numba
def test_jacobians_agree(problem):
    frame, X, U = problem
    a = _kernels.numba_impl.discrete_jac(X, U, frame, 1.0, 0.1)
    b = _kernels.numpy_impl.discrete_jac(X, U, frame, 1.0, 0.1)
    for p, q in zip(a, b):
        np.testing.assert_allclose(p, q, rtol=1e-6, atol=1e-8)


def test_env_flag_selects_numpy():
    env = dict(os.environ, MORPHOFLIGHT_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from morphoflight import _kernels; print(_kernels.backend_name)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_numpy_backend_short_run_matches():
    code = (
        "import numpy as np\n"
        "from morphoflight.sim import Scenario, run\n"
        "s = Scenario(duration=0.2, position=(0.1, 0.0, 1.0), reference='hold', hold_position=(0, 0, 1),"
        " ground_effect=False)\n"
        "print(repr(float(run(s).x[-1, 0])))\n"
    )
    vals = []
    for flag in ("1", "0"):
        env = dict(os.environ, MORPHOFLIGHT_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        vals.append(float(out.stdout))
    assert vals[0] == pytest.approx(vals[1], abs=1e-8)
