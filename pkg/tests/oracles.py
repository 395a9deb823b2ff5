"""Independent reference implementations used to cross-check the library.

Everything here is deliberately naive (explicit 4x4 products, pure-python
Newton-Euler recursions, finite differences) and shares no code with the
package under test. Written before the main build; keep it that way.
"""

import numpy as np


def dh_matrix(a, alpha, d, theta):
    """Single standard-DH homogeneous transform Rz(theta)*Tz(d)*Tx(a)*Rx(alpha)."""
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, a * ct],
            [st, ct * ca, -ct * sa, a * st],
            [0.0, sa, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def fk_frames_naive(dh, q):
    """All joint frames as 4x4 transforms, base frame first (n+1 entries)."""
    frames = [np.eye(4)]
    T = np.eye(4)
    for i in range(dh.shape[0]):
        a, alpha, d, off = dh[i]
        T = T @ dh_matrix(a, alpha, d, q[i] + off)
        frames.append(T.copy())
    return frames


def ee_position_naive(dh, q):
    return fk_frames_naive(dh, q)[-1][:3, 3]


def point_position_naive(dh, q, link_index, offset):
    """World position of a point fixed in link `link_index` (1-based)."""
    T = fk_frames_naive(dh, q)[link_index]
    return T[:3, 3] + T[:3, :3] @ np.asarray(offset, dtype=float)


def com_positions_naive(dh, coms, q):
    frames = fk_frames_naive(dh, q)
    return np.array(
        [frames[i + 1][:3, 3] + frames[i + 1][:3, :3] @ coms[i] for i in range(len(coms))]
    )


def potential_energy_naive(dh, masses, coms, q, gravity):
    c = com_positions_naive(dh, coms, q)
    return -float(np.sum(masses[:, None] * c @ np.asarray(gravity, dtype=float)))


def rnea_naive(dh, masses, coms, inertias, q, qd, qdd, gravity):
    """Inverse dynamics tau = M(q)qdd + C(q,qd)qd + G(q), base-frame Newton-Euler."""
    n = dh.shape[0]
    frames = fk_frames_naive(dh, q)
    R = [frames[i][:3, :3] for i in range(n + 1)]
    o = [frames[i][:3, 3] for i in range(n + 1)]
    z = [R[i][:, 2] for i in range(n)]  # z[i] is the axis of joint i+1

    w = np.zeros(3)
    wd = np.zeros(3)
    a_o = -np.asarray(gravity, dtype=float)  # gravity via fictitious base acceleration
    a_c = np.zeros((n, 3))
    w_all = np.zeros((n, 3))
    wd_all = np.zeros((n, 3))
    c_world = np.zeros((n, 3))
    for i in range(n):
        w_new = w + qd[i] * z[i]
        wd = wd + qdd[i] * z[i] + np.cross(w, qd[i] * z[i])
        r = o[i + 1] - o[i]
        a_o = a_o + np.cross(wd, r) + np.cross(w_new, np.cross(w_new, r))
        c_world[i] = o[i + 1] + R[i + 1] @ coms[i]
        rc = c_world[i] - o[i + 1]
        a_c[i] = a_o + np.cross(wd, rc) + np.cross(w_new, np.cross(w_new, rc))
        w = w_new
        w_all[i] = w
        wd_all[i] = wd

    tau = np.zeros(n)
    f_child = np.zeros(3)
    n_child = np.zeros(3)
    for i in range(n - 1, -1, -1):
        Iw = R[i + 1] @ inertias[i] @ R[i + 1].T
        F = masses[i] * a_c[i]
        N = Iw @ wd_all[i] + np.cross(w_all[i], Iw @ w_all[i])
        f_total = F + f_child
        n_total = (
            N
            + n_child
            + np.cross(c_world[i] - o[i], F)
            + np.cross(o[i + 1] - o[i], f_child)
        )
        tau[i] = n_total @ z[i]
        f_child = f_total
        n_child = n_total
    return tau


def mass_matrix_from_jacobians(dh, masses, coms, inertias, q):
    """M as a sum of per-link COM Jacobian quadratic forms (no CRBA, no RNEA)."""
    n = dh.shape[0]
    frames = fk_frames_naive(dh, q)
    o = [frames[i][:3, 3] for i in range(n + 1)]
    z = [frames[i][:3, :3][:, 2] for i in range(n)]
    M = np.zeros((n, n))
    for l in range(n):
        Rl = frames[l + 1][:3, :3]
        c = o[l + 1] + Rl @ coms[l]
        Jv = np.zeros((3, n))
        Jw = np.zeros((3, n))
        for k in range(l + 1):
            Jv[:, k] = np.cross(z[k], c - o[k])
            Jw[:, k] = z[k]
        Iw = Rl @ inertias[l] @ Rl.T
        M += masses[l] * (Jv.T @ Jv) + Jw.T @ Iw @ Jw
    return M


def jacobian_fd(dh, q, h=1e-6):
    """Translational EE Jacobian by central differences of the FK position."""
    n = len(q)
    J = np.zeros((3, n))
    for k in range(n):
        dq = np.zeros(n)
        dq[k] = h
        J[:, k] = (ee_position_naive(dh, q + dq) - ee_position_naive(dh, q - dq)) / (2 * h)
    return J


def contact_jacobian_fd(dh, q, link_index, offset, h=1e-6):
    n = len(q)
    J = np.zeros((3, n))
    for k in range(n):
        dq = np.zeros(n)
        dq[k] = h
        J[:, k] = (
            point_position_naive(dh, q + dq, link_index, offset)
            - point_position_naive(dh, q - dq, link_index, offset)
        ) / (2 * h)
    return J


def gravity_fd(dh, masses, coms, q, gravity, h=1e-6):
    """G(q) as the central-difference gradient of the potential energy."""
    n = len(q)
    G = np.zeros(n)
    for k in range(n):
        dq = np.zeros(n)
        dq[k] = h
        G[k] = (
            potential_energy_naive(dh, masses, coms, q + dq, gravity)
            - potential_energy_naive(dh, masses, coms, q - dq, gravity)
        ) / (2 * h)
    return G


def mass_matrix_rate_fd(mass_fn, q, qd, h=1e-6):
    """Mdot = dM/dt along qd by a central difference of any mass-matrix callable."""
    return (mass_fn(q + h * qd) - mass_fn(q - h * qd)) / (2 * h)
