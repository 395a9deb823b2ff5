"""Numba-compiled numeric kernels for the serial-chain arm.

Everything operates on plain float64 arrays unpacked from RobotModel so the
hot loop (4 RK4 stages x 1 kHz) stays allocation-light. The mass matrix is a
base-frame composite-rigid-body pass; the bias vector comes from a separate
Newton-Euler recursion so the two can cross-check each other in tests.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True)
def fk_frames(dh, q):
    """Stacked base->frame_i transforms, (n+1, 4, 4), identity first."""
    n = dh.shape[0]
    frames = np.empty((n + 1, 4, 4))
    frames[0] = np.eye(4)
    for i in range(n):
        a = dh[i, 0]
        alpha = dh[i, 1]
        d = dh[i, 2]
        theta = q[i] + dh[i, 3]
        ct, st = np.cos(theta), np.sin(theta)
        ca, sa = np.cos(alpha), np.sin(alpha)
        A = np.empty((4, 4))
        A[0, 0] = ct
        A[0, 1] = -st * ca
        A[0, 2] = st * sa
        A[0, 3] = a * ct
        A[1, 0] = st
        A[1, 1] = ct * ca
        A[1, 2] = -ct * sa
        A[1, 3] = a * st
        A[2, 0] = 0.0
        A[2, 1] = sa
        A[2, 2] = ca
        A[2, 3] = d
        A[3, 0] = 0.0
        A[3, 1] = 0.0
        A[3, 2] = 0.0
        A[3, 3] = 1.0
        frames[i + 1] = frames[i] @ A
    return frames


@njit(cache=True)
def point_jacobian(frames, link_index, offset):
    """Geometric Jacobian (6 x n) of a point fixed in link `link_index` (1-based).

    Columns for joints distal to the link are zero. Rows: translation, rotation.
    """
    n = frames.shape[0] - 1
    R = np.ascontiguousarray(frames[link_index, :3, :3])
    p = frames[link_index, :3, 3].copy() + R @ offset
    J = np.zeros((6, n))
    for k in range(link_index):
        z = frames[k, :3, 2].copy()
        o = frames[k, :3, 3].copy()
        J[:3, k] = _cross(z, p - o)
        J[3:, k] = z
    return J


@njit(cache=True)
def crba(dh, masses, coms, inertias, q):
    """Composite-rigid-body mass matrix, assembled in the base frame."""
    n = dh.shape[0]
    frames = fk_frames(dh, q)
    M = np.zeros((n, n))

    # composite body of links j..n-1: mass, world COM, world inertia about COM
    mc = 0.0
    cc = np.zeros(3)
    Ic = np.zeros((3, 3))
    for j in range(n - 1, -1, -1):
        R = np.ascontiguousarray(frames[j + 1, :3, :3])
        c_link = frames[j + 1, :3, 3].copy() + R @ np.ascontiguousarray(coms[j])
        I_link = R @ np.ascontiguousarray(inertias[j]) @ R.T
        m_new = mc + masses[j]
        c_new = (mc * cc + masses[j] * c_link) / m_new
        d1 = cc - c_new
        d2 = c_link - c_new
        shift1 = mc * ((d1 @ d1) * np.eye(3) - np.outer(d1, d1))
        shift2 = masses[j] * ((d2 @ d2) * np.eye(3) - np.outer(d2, d2))
        Ic = Ic + shift1 + I_link + shift2
        cc = c_new
        mc = m_new

        z_j = frames[j, :3, 2].copy()
        o_j = frames[j, :3, 3].copy()
        F = mc * _cross(z_j, cc - o_j)
        Nc = Ic @ z_j
        for i in range(j + 1):
            z_i = frames[i, :3, 2].copy()
            o_i = frames[i, :3, 3].copy()
            moment = Nc + _cross(cc - o_i, F)
            M[i, j] = z_i @ moment
            M[j, i] = M[i, j]
    return M


@njit(cache=True)
def rnea(dh, masses, coms, inertias, q, qd, qdd, gravity):
    """Inverse dynamics tau = M qdd + C qd + G via base-frame Newton-Euler."""
    n = dh.shape[0]
    frames = fk_frames(dh, q)

    w = np.zeros(3)
    wd = np.zeros(3)
    a_o = -gravity
    a_c = np.empty((n, 3))
    w_all = np.empty((n, 3))
    wd_all = np.empty((n, 3))
    c_world = np.empty((n, 3))
    for i in range(n):
        z = frames[i, :3, 2].copy()
        w_new = w + qd[i] * z
        wd = wd + qdd[i] * z + _cross(w, qd[i] * z)
        r = frames[i + 1, :3, 3] - frames[i, :3, 3]  # contiguous result of subtraction
        a_o = a_o + _cross(wd, r) + _cross(w_new, _cross(w_new, r))
        Ri = np.ascontiguousarray(frames[i + 1, :3, :3])
        c_world[i] = frames[i + 1, :3, 3].copy() + Ri @ np.ascontiguousarray(coms[i])
        rc = c_world[i] - frames[i + 1, :3, 3]
        a_c[i] = a_o + _cross(wd, rc) + _cross(w_new, _cross(w_new, rc))
        w = w_new
        w_all[i] = w
        wd_all[i] = wd

    tau = np.empty(n)
    f_child = np.zeros(3)
    n_child = np.zeros(3)
    for i in range(n - 1, -1, -1):
        R = np.ascontiguousarray(frames[i + 1, :3, :3])
        Iw = R @ np.ascontiguousarray(inertias[i]) @ R.T
        F = masses[i] * a_c[i]
        Nc = Iw @ wd_all[i] + _cross(w_all[i], Iw @ w_all[i])
        n_total = (
            Nc
            + n_child
            + _cross(c_world[i] - frames[i, :3, 3], F)
            + _cross(frames[i + 1, :3, 3] - frames[i, :3, 3], f_child)
        )
        tau[i] = n_total @ frames[i, :3, 2].copy()
        f_child = F + f_child
        n_child = n_total
    return tau


@njit(cache=True)
def friction_torque(viscous, coulomb, v_eps, qd):
    n = qd.shape[0]
    tau = np.empty(n)
    for i in range(n):
        tau[i] = -(viscous[i] * qd[i] + coulomb[i] * np.tanh(qd[i] / v_eps))
    return tau


@njit(cache=True)
def _accel(dh, masses, coms, inertias, viscous, coulomb, v_eps, gravity, q, qd, tau_applied):
    """qdd = M^-1 (tau_applied + tau_friction - C qd - G). tau_applied = tau_total + tau_ext."""
    M = crba(dh, masses, coms, inertias, q)
    bias = rnea(dh, masses, coms, inertias, q, qd, np.zeros(q.shape[0]), gravity)
    rhs = tau_applied + friction_torque(viscous, coulomb, v_eps, qd) - bias
    return np.linalg.solve(M, rhs)


@njit(cache=True)
def rk4_step(dh, masses, coms, inertias, viscous, coulomb, v_eps, gravity, q, qd, tau, tau_ext, dt):
    """One fixed-step RK4 integration of the plant; torques held constant over dt."""
    tau_applied = tau + tau_ext

    k1q = qd
    k1v = _accel(dh, masses, coms, inertias, viscous, coulomb, v_eps, gravity, q, qd, tau_applied)

    q2 = q + 0.5 * dt * k1q
    v2 = qd + 0.5 * dt * k1v
    k2q = v2
    k2v = _accel(dh, masses, coms, inertias, viscous, coulomb, v_eps, gravity, q2, v2, tau_applied)

    q3 = q + 0.5 * dt * k2q
    v3 = qd + 0.5 * dt * k2v
    k3q = v3
    k3v = _accel(dh, masses, coms, inertias, viscous, coulomb, v_eps, gravity, q3, v3, tau_applied)

    q4 = q + dt * k3q
    v4 = qd + dt * k3v
    k4q = v4
    k4v = _accel(dh, masses, coms, inertias, viscous, coulomb, v_eps, gravity, q4, v4, tau_applied)

    q_out = q + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    qd_out = qd + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return q_out, qd_out
