import math

import numpy as np
import pytest
from scipy.optimize import minimize

from morphoflight.dynamics import NU, NX, hover_input, model_frame
from morphoflight.nmpc import (
    CONVERGE,
    PRESETS,
    REAL_TIME,
    BlendContext,
    NmpcController,
    OcpConfig,
    blend_alpha,
    blended_weights,
    condense,
    initial_iterate,
    mpc_step,
    sqp_iterate,
    stage_cost,
    transcribe,
)


def _nlp(params, alpha=1.0, offset=(0.2, -0.1, 0.3), phi=0.0, cfg=None):
    cfg = cfg or OcpConfig()
    x0 = np.zeros(NX)
    x0[0:3] = offset
    x0[5] = 0.05
    return transcribe(x0, np.zeros(NX), hover_input(phi, params), model_frame(phi, params), alpha, cfg)


def test_counts(params):
    nlp = _nlp(params)
    assert nlp.counts() == {"inputs": 40, "states": 132, "defects": 120, "initial": 12}
    assert nlp.dt == pytest.approx(0.1)


def test_presets_valid():
    for name in PRESETS:
        cfg = OcpConfig.from_preset(name)
        assert cfg.Q2[:9].sum() == 0.0
    with pytest.raises(ValueError):
        OcpConfig.from_preset("nope")


def test_config_validation():
    with pytest.raises(ValueError):
        OcpConfig(nodes=1)
    with pytest.raises(ValueError):
        OcpConfig(u_ref_mode="bogus")


@pytest.mark.parametrize(
    "z, phi, expected",
    [(1.0, 0.0, 1.0), (0.45, 0.0, 1.0), (0.0, 0.0, 0.0), (0.225, 0.0, 0.5), (0.225, math.pi / 3, 0.25),
     (2.0, math.pi / 2, 0.0), (-1.0, 0.0, 0.0)],
)
def test_blend_alpha(z, phi, expected):
    assert blend_alpha(z, phi, BlendContext(0.45, 0.0)) == pytest.approx(expected, abs=1e-15)


def test_blend_context_order():
    with pytest.raises(ValueError):
        BlendContext(z_star=0.1, z_g=0.2)


def test_stage_cost_is_blend_of_weights(params):
    cfg = OcpConfig()
    rng = np.random.default_rng(0)
    x, xr, u, ur = rng.normal(size=NX), rng.normal(size=NX), rng.random(NU), rng.random(NU)
    a = 0.3
    ex, eu = x - xr, u - ur
    direct = ex @ (blended_weights(a, cfg) * ex) + eu @ (cfg.R * eu)
    assert stage_cost(x, u, xr, ur, a, cfg) == pytest.approx(direct)


def test_condensed_gradient_matches_finite_difference(params):
    nlp = _nlp(params)
    it = initial_iterate(nlp)
    qp = condense(nlp, it)
    u = it.U.ravel()
    f = lambda v: nlp.reduced_objective(v)  # noqa: E731
    for j in (0, 5, 17, 39):
        e = np.zeros_like(u)
        e[j] = 1e-6
        fd = (f(u + e) - f(u - e)) / 2e-6
        assert qp.g[j] == pytest.approx(fd, rel=1e-4, abs=1e-6)


def test_converge_matches_lbfgsb(params):
    nlp = _nlp(params, alpha=0.7)
    it, info = sqp_iterate(nlp, initial_iterate(nlp), CONVERGE, tol=1e-10, max_iter=100)
    lb, ub = nlp.bounds()
    ref = minimize(nlp.reduced_objective, np.tile(nlp.u_ref, nlp.N), method="L-BFGS-B",
                   bounds=list(zip(lb, ub)), options={"ftol": 1e-15, "gtol": 1e-10, "maxiter": 5000})
    assert info.objective <= ref.fun * (1 + 1e-6) + 1e-9
    assert info.primal_feasibility < 1e-9
    assert np.all(it.U >= 0.0) and np.all(it.U <= 1.0)


def test_real_time_single_iteration(params):
    nlp = _nlp(params)
    it0 = initial_iterate(nlp)
    it, info = sqp_iterate(nlp, it0, REAL_TIME)
    assert info.iterations == 1
    assert info.objective < nlp.objective(it0.X, it0.U)


def test_sqp_rejects_nonfinite(params):
    nlp = _nlp(params)
    it = initial_iterate(nlp)
    it.U[0, 0] = np.nan
    with pytest.raises(ValueError):
        sqp_iterate(nlp, it)


def test_per_node_reference(params):
    cfg = OcpConfig()
    x_ref = np.zeros((cfg.nodes, NX))
    x_ref[:, 2] = np.linspace(0, -0.5, cfg.nodes)
    nlp = transcribe(np.zeros(NX), x_ref, hover_input(0, params), model_frame(0, params), 1.0, cfg)
    it, _ = sqp_iterate(nlp, initial_iterate(nlp), CONVERGE)
    assert it.X[-1, 2] < -0.1


def test_controller_hover_stays_put(params):
    ctl = NmpcController(params, OcpConfig())
    x = np.zeros(NX)
    u = ctl.step(x, np.zeros(NX), 0.0)
    np.testing.assert_allclose(u, hover_input(0.0, params), atol=1e-6)


def test_controller_alpha_cadence(params):
    ctl = NmpcController(params, OcpConfig(alpha_update_period=10), BlendContext(0.45, 0.0), record=True)
    x = np.zeros(NX)
    x[2] = 1.0
    ctl.step(x, x, 0.0)
    x[2] = 0.1
    for _ in range(9):
        ctl.step(x, x, 0.0)
    assert ctl.state.alpha == 1.0
    ctl.step(x, x, 0.0)
    assert ctl.state.alpha == pytest.approx(0.1 / 0.45)
    assert len(ctl.state.history) == 11


def test_controller_u_ref_modes(params):
    assert np.all(NmpcController(params, OcpConfig(u_ref_mode="zero")).u_ref(0.5) == 0)
    level = NmpcController(params, OcpConfig(u_ref_mode="level")).u_ref(0.5)
    np.testing.assert_allclose(level, hover_input(0.0, params))


def test_controller_failsafe_holds_last_input(params):
    ctl = NmpcController(params, OcpConfig())
    x = np.zeros(NX)
    u0 = ctl.step(x, np.zeros(NX), 0.0)
    x[4] = math.radians(89.5)  # singular pitch breaks the rollout
    bad_ref = np.zeros(NX)
    u1 = ctl.step(x, bad_ref, 0.0)
    if ctl.last_diagnostics.failed:
        np.testing.assert_array_equal(u1, u0)
    assert np.all(np.isfinite(u1))


def test_mpc_step_functional(params):
    ctl = NmpcController(params, OcpConfig())
    x = np.zeros(NX)
    x[0] = 0.3
    u = mpc_step(x, (np.zeros(NX), None), 0.0, 1.0, ctl)
    assert u.shape == (NU,) and np.all((u >= 0) & (u <= 1))
