"""Hot numeric kernels: dynamics, RK4, horizon rollout and discrete sensitivities.

Two implementations share one contract. The loop-style versions are
compiled with numba; the batch versions are vectorized numpy and evaluate
every finite-difference perturbation of every node in one pass. The
default is chosen by ``MORPHOFLIGHT_DISABLE_NUMBA`` (see ``_accel``).

``frame`` is the constant block from ``dynamics.model_frame``:
``[mass, g, F(3x4), T(3x4), J(3x3), Jinv(3x3)]`` flattened row-major.
"""
import math
from types import SimpleNamespace

import numpy as np

from ._accel import njit, use_numba

FD_STEP = 1e-6


def rotation_zyx(psi, theta, phi):
    cps, sps = math.cos(psi), math.sin(psi)
    cth, sth = math.cos(theta), math.sin(theta)
    cph, sph = math.cos(phi), math.sin(phi)
    return np.array(
        [
            [cps * cth, cps * sth * sph - sps * cph, cps * sth * cph + sps * sph],
            [sps * cth, sps * sth * sph + cps * cph, sps * sth * cph - cps * sph],
            [-sth, cth * sph, cth * cph],
        ]
    )


# ------------------------------------------------------------------ numba path

@njit
def _eom_into(x, u, frame, ge, out):
    m = frame[0]
    g = frame[1]
    fb0 = 0.0
    fb1 = 0.0
    fb2 = 0.0
    tb0 = 0.0
    tb1 = 0.0
    tb2 = 0.0
    for i in range(4):
        ui = ge * u[i]
        fb0 += frame[2 + i] * ui
        fb1 += frame[6 + i] * ui
        fb2 += frame[10 + i] * ui
        tb0 += frame[14 + i] * ui
        tb1 += frame[18 + i] * ui
        tb2 += frame[22 + i] * ui

    psi = x[3]
    th = x[4]
    ph = x[5]
    cps = math.cos(psi)
    sps = math.sin(psi)
    cth = math.cos(th)
    sth = math.sin(th)
    cph = math.cos(ph)
    sph = math.sin(ph)

    wx = x[9]
    wy = x[10]
    wz = x[11]

    out[0] = x[6]
    out[1] = x[7]
    out[2] = x[8]
    # body rates -> zyx Euler rates
    out[3] = (sph * wy + cph * wz) / cth
    out[4] = cph * wy - sph * wz
    out[5] = wx + (sph * wy + cph * wz) * sth / cth

    r00 = cps * cth
    r01 = cps * sth * sph - sps * cph
    r02 = cps * sth * cph + sps * sph
    r10 = sps * cth
    r11 = sps * sth * sph + cps * cph
    r12 = sps * sth * cph - cps * sph
    r20 = -sth
    r21 = cth * sph
    r22 = cth * cph
    out[6] = (r00 * fb0 + r01 * fb1 + r02 * fb2) / m
    out[7] = (r10 * fb0 + r11 * fb1 + r12 * fb2) / m
    out[8] = (r20 * fb0 + r21 * fb1 + r22 * fb2) / m - g

    # omega_dot = Jinv (tau - omega x J omega)
    jw0 = frame[26] * wx + frame[27] * wy + frame[28] * wz
    jw1 = frame[29] * wx + frame[30] * wy + frame[31] * wz
    jw2 = frame[32] * wx + frame[33] * wy + frame[34] * wz
    c0 = tb0 - (wy * jw2 - wz * jw1)
    c1 = tb1 - (wz * jw0 - wx * jw2)
    c2 = tb2 - (wx * jw1 - wy * jw0)
    out[9] = frame[35] * c0 + frame[36] * c1 + frame[37] * c2
    out[10] = frame[38] * c0 + frame[39] * c1 + frame[40] * c2
    out[11] = frame[41] * c0 + frame[42] * c1 + frame[43] * c2


@njit
def _rk4_into(x, u, frame, ge, dt, out, k1, k2, k3, k4, tmp):
    _eom_into(x, u, frame, ge, k1)
    for i in range(12):
        tmp[i] = x[i] + 0.5 * dt * k1[i]
    _eom_into(tmp, u, frame, ge, k2)
    for i in range(12):
        tmp[i] = x[i] + 0.5 * dt * k2[i]
    _eom_into(tmp, u, frame, ge, k3)
    for i in range(12):
        tmp[i] = x[i] + dt * k3[i]
    _eom_into(tmp, u, frame, ge, k4)
    for i in range(12):
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit
def eom_nb(x, u, frame, ge):
    out = np.empty(12)
    _eom_into(x, u, frame, ge, out)
    return out


@njit
def rk4_nb(x, u, frame, ge, dt):
    out = np.empty(12)
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    _rk4_into(x, u, frame, ge, dt, out, k1, k2, k3, k4, tmp)
    return out


@njit
def rollout_nb(x0, U, frame, ge, dt):
    N = U.shape[0]
    X = np.empty((N + 1, 12))
    X[0] = x0
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    for k in range(N):
        _rk4_into(X[k], U[k], frame, ge, dt, X[k + 1], k1, k2, k3, k4, tmp)
    return X


@njit
def shoot_nb(X, U, frame, ge, dt):
    N = U.shape[0]
    F = np.empty((N, 12))
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    for k in range(N):
        _rk4_into(X[k], U[k], frame, ge, dt, F[k], k1, k2, k3, k4, tmp)
    return F


@njit
def discrete_jac_nb(X, U, frame, ge, dt):
    N = U.shape[0]
    h = FD_STEP
    F = np.empty((N, 12))
    A = np.empty((N, 12, 12))
    B = np.empty((N, 12, 4))
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    fp = np.empty(12)
    fm = np.empty(12)
    xp = np.empty(12)
    up = np.empty(4)
    for k in range(N):
        _rk4_into(X[k], U[k], frame, ge, dt, F[k], k1, k2, k3, k4, tmp)
        for j in range(12):
            for i in range(12):
                xp[i] = X[k, i]
            xp[j] += h
            _rk4_into(xp, U[k], frame, ge, dt, fp, k1, k2, k3, k4, tmp)
            xp[j] -= 2.0 * h
            _rk4_into(xp, U[k], frame, ge, dt, fm, k1, k2, k3, k4, tmp)
            for i in range(12):
                A[k, i, j] = (fp[i] - fm[i]) / (2.0 * h)
        for j in range(4):
            for i in range(4):
                up[i] = U[k, i]
            up[j] += h
            _rk4_into(X[k], up, frame, ge, dt, fp, k1, k2, k3, k4, tmp)
            up[j] -= 2.0 * h
            _rk4_into(X[k], up, frame, ge, dt, fm, k1, k2, k3, k4, tmp)
            for i in range(12):
                B[k, i, j] = (fp[i] - fm[i]) / (2.0 * h)
    return F, A, B


# ------------------------------------------------------------------ numpy path

def eom_batch(X, U, frame, ge):
    """Vectorized dynamics over rows of ``X`` (n, 12) and ``U`` (n, 4)."""
    m, g = frame[0], frame[1]
    Fm = frame[2:14].reshape(3, 4)
    Tm = frame[14:26].reshape(3, 4)
    J = frame[26:35].reshape(3, 3)
    Jinv = frame[35:44].reshape(3, 3)
    fb = ge * U @ Fm.T
    tb = ge * U @ Tm.T

    psi, th, ph = X[:, 3], X[:, 4], X[:, 5]
    cps, sps = np.cos(psi), np.sin(psi)
    cth, sth = np.cos(th), np.sin(th)
    cph, sph = np.cos(ph), np.sin(ph)
    w = X[:, 9:12]
    wx, wy, wz = w[:, 0], w[:, 1], w[:, 2]

    out = np.empty_like(X)
    out[:, 0:3] = X[:, 6:9]
    out[:, 3] = (sph * wy + cph * wz) / cth
    out[:, 4] = cph * wy - sph * wz
    out[:, 5] = wx + (sph * wy + cph * wz) * sth / cth

    R = np.empty((X.shape[0], 3, 3))
    R[:, 0, 0] = cps * cth
    R[:, 0, 1] = cps * sth * sph - sps * cph
    R[:, 0, 2] = cps * sth * cph + sps * sph
    R[:, 1, 0] = sps * cth
    R[:, 1, 1] = sps * sth * sph + cps * cph
    R[:, 1, 2] = sps * sth * cph - cps * sph
    R[:, 2, 0] = -sth
    R[:, 2, 1] = cth * sph
    R[:, 2, 2] = cth * cph
    out[:, 6:9] = np.einsum("nij,nj->ni", R, fb) / m
    out[:, 8] -= g
    out[:, 9:12] = (tb - np.cross(w, w @ J.T)) @ Jinv.T
    return out


def rk4_batch(X, U, frame, ge, dt):
    k1 = eom_batch(X, U, frame, ge)
    k2 = eom_batch(X + 0.5 * dt * k1, U, frame, ge)
    k3 = eom_batch(X + 0.5 * dt * k2, U, frame, ge)
    k4 = eom_batch(X + dt * k3, U, frame, ge)
    return X + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def eom_np(x, u, frame, ge):
    return eom_batch(x[None, :], u[None, :], frame, ge)[0]


def rk4_np(x, u, frame, ge, dt):
    return rk4_batch(x[None, :], u[None, :], frame, ge, dt)[0]


def rollout_np(x0, U, frame, ge, dt):
    N = U.shape[0]
    X = np.empty((N + 1, 12))
    X[0] = x0
    for k in range(N):
        X[k + 1] = rk4_batch(X[k : k + 1], U[k : k + 1], frame, ge, dt)[0]
    return X


def shoot_np(X, U, frame, ge, dt):
    return rk4_batch(X[:-1], U, frame, ge, dt)


_PERT = None


def _perturbations():
    global _PERT
    if _PERT is None:
        P = np.zeros((33, 16))
        for j in range(16):
            P[1 + 2 * j, j] = FD_STEP
            P[2 + 2 * j, j] = -FD_STEP
        _PERT = P
    return _PERT


def discrete_jac_np(X, U, frame, ge, dt):
    N = U.shape[0]
    P = _perturbations()
    Z = np.concatenate([X[:-1], U], axis=1)  # (N, 16)
    Zp = (Z[:, None, :] + P[None, :, :]).reshape(-1, 16)
    Fp = rk4_batch(Zp[:, :12], Zp[:, 12:], frame, ge, dt).reshape(N, 33, 12)
    D = (Fp[:, 1::2, :] - Fp[:, 2::2, :]) / (2.0 * FD_STEP)  # (N, 16, 12)
    D = np.transpose(D, (0, 2, 1))
    return Fp[:, 0, :].copy(), D[:, :, :12].copy(), D[:, :, 12:].copy()


numba_impl = SimpleNamespace(
    eom=eom_nb, rk4=rk4_nb, rollout=rollout_nb, shoot=shoot_nb, discrete_jac=discrete_jac_nb
)
numpy_impl = SimpleNamespace(
    eom=eom_np, rk4=rk4_np, rollout=rollout_np, shoot=shoot_np, discrete_jac=discrete_jac_np
)

_active = numba_impl if use_numba() else numpy_impl
backend_name = "numba" if use_numba() else "numpy"

eom = _active.eom
rk4 = _active.rk4
rollout = _active.rollout
shoot = _active.shoot
discrete_jac = _active.discrete_jac
