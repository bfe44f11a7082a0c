import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphoflight.acceptance import qp_bruteforce
from morphoflight.errors import NumericalBreakdown
from morphoflight.nmpc import kkt_residual, qp_solve


def _random_qp(rng, n):
    A = rng.normal(size=(n, n))
    H = A @ A.T + 0.1 * np.eye(n)
    g = rng.normal(scale=3.0, size=n)
    lb = rng.uniform(-1.0, 0.0, n)
    ub = lb + rng.uniform(0.1, 1.5, n)
    return H, g, lb, ub


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_matches_bruteforce(n):
    rng = np.random.default_rng(n)
    for _ in range(40):
        H, g, lb, ub = _random_qp(rng, n)
        res = qp_solve(H, g, lb, ub)
        np.testing.assert_allclose(res.x, qp_bruteforce(H, g, lb, ub), atol=1e-9)
        assert res.kkt_residual < 1e-9


def test_unconstrained_interior():
    H = np.diag([2.0, 4.0])
    g = np.array([-1.0, -1.0])
    res = qp_solve(H, g, -np.ones(2) * 10, np.ones(2) * 10)
    np.testing.assert_allclose(res.x, [0.5, 0.25])
    assert np.all(res.working_set == 0)


def test_warm_start_reuses_active_set():
    rng = np.random.default_rng(9)
    H, g, lb, ub = _random_qp(rng, 40)
    cold = qp_solve(H, g, lb, ub)
    warm = qp_solve(H, g, lb, ub, x0=cold.x, working_set=cold.working_set)
    np.testing.assert_allclose(warm.x, cold.x, atol=1e-10)
    # one solve on the given working set plus the optimality check
    assert warm.iterations <= 2 < cold.iterations


def test_infeasible_start_is_projected():
    H = np.eye(2)
    g = np.zeros(2)
    res = qp_solve(H, g, np.zeros(2), np.ones(2), x0=np.array([5.0, -5.0]))
    np.testing.assert_allclose(res.x, [0.0, 0.0], atol=1e-12)


def test_bound_variables_exactly_on_bound():
    H = np.eye(3)
    g = np.array([5.0, -5.0, 0.1])
    res = qp_solve(H, g, np.zeros(3), np.ones(3))
    assert res.x[0] == 0.0 and res.x[1] == 1.0


def test_inverted_bounds():
    with pytest.raises(ValueError):
        qp_solve(np.eye(1), np.zeros(1), np.ones(1), np.zeros(1))


def test_indefinite_hessian_regularized_or_raises():
    H = np.array([[1.0, 0.0], [0.0, -1e6]])
    try:
        res = qp_solve(H, np.zeros(2), -np.ones(2), np.ones(2))
    except NumericalBreakdown:
        return
    assert np.all(np.isfinite(res.x))


def test_kkt_residual_zero_at_solution():
    assert kkt_residual(np.eye(1), np.array([-2.0]), np.zeros(1), np.ones(1), np.ones(1)) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_property_kkt(seed, n):
    H, g, lb, ub = _random_qp(np.random.default_rng(seed), n)
    res = qp_solve(H, g, lb, ub)
    assert np.all(res.x >= lb) and np.all(res.x <= ub)
    assert kkt_residual(H, g, lb, ub, res.x) < 1e-8
