"""Simulated plant: rigid-body terms, joint friction and the RK4 integrator.

The controller side of the package never imports this module; it exists for
the simulator, the tests and the energy monitor.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import CompliantArmError
from .kinematics import RobotModel


class SingularDynamicsError(CompliantArmError):
    """Mass-matrix solve failed (unreachable for a valid SPD mass matrix)."""


@dataclass
class JointState:
    """Integrated simulator state."""

    q: np.ndarray
    qdot: np.ndarray
    t: float = 0.0

    def copy(self):
        return JointState(self.q.copy(), self.qdot.copy(), self.t)


@dataclass
class DynamicsTerms:
    M: np.ndarray
    C: np.ndarray
    G: np.ndarray


def mass_matrix(model: RobotModel, q) -> np.ndarray:
    """Composite-rigid-body mass matrix (symmetric positive definite)."""
    q = model.check_q(q, warn_limits=False)
    return _kernels.crba(model.dh, model.masses, model.coms, model.inertias, q)


def coriolis_matrix(model: RobotModel, q, qdot, h: float = 1e-6) -> np.ndarray:
    """Coriolis/centrifugal matrix from Christoffel symbols of M.

    dM/dq comes from central differences of the mass matrix; the Christoffel
    assembly makes qd^T (Mdot - 2C) qd vanish identically regardless of the
    finite-difference error, which is the cancellation the monitor relies on.
    """
    q = model.check_q(q, warn_limits=False)
    qdot = np.asarray(qdot, dtype=float)
    if qdot.shape != (model.n,):
        raise ValueError(f"expected qdot of shape ({model.n},)")
    n = model.n
    dM = np.empty((n, n, n))
    for k in range(n):
        dq = np.zeros(n)
        dq[k] = h
        M_plus = _kernels.crba(model.dh, model.masses, model.coms, model.inertias, q + dq)
        M_minus = _kernels.crba(model.dh, model.masses, model.coms, model.inertias, q - dq)
        dM[k] = (M_plus - M_minus) / (2.0 * h)
    C = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += (dM[k, i, j] + dM[j, i, k] - dM[i, j, k]) * qdot[k]
            C[i, j] = 0.5 * acc
    return C


def gravity_torque(model: RobotModel, q) -> np.ndarray:
    """G(q), the gradient of gravitational potential energy."""
    q = model.check_q(q, warn_limits=False)
    zero = np.zeros(model.n)
    return _kernels.rnea(
        model.dh, model.masses, model.coms, model.inertias, q, zero, zero, model.gravity
    )


def friction_torque(model: RobotModel, qdot) -> np.ndarray:
    """Viscous plus smoothed-Coulomb joint friction; always opposes motion."""
    qdot = np.asarray(qdot, dtype=float)
    if qdot.shape != (model.n,):
        raise ValueError(f"expected qdot of shape ({model.n},)")
    return _kernels.friction_torque(model.viscous, model.coulomb, model.v_eps, qdot)


def bias_torque(model: RobotModel, q, qdot) -> np.ndarray:
    """C(q, qd) qd + G(q) in one Newton-Euler pass (plant-side convenience)."""
    q = model.check_q(q, warn_limits=False)
    qdot = np.asarray(qdot, dtype=float)
    return _kernels.rnea(
        model.dh,
        model.masses,
        model.coms,
        model.inertias,
        q,
        qdot,
        np.zeros(model.n),
        model.gravity,
    )


def terms(model: RobotModel, q, qdot) -> DynamicsTerms:
    return DynamicsTerms(
        M=mass_matrix(model, q), C=coriolis_matrix(model, q, qdot), G=gravity_torque(model, q)
    )


def kinetic_energy(model: RobotModel, q, qdot) -> float:
    qdot = np.asarray(qdot, dtype=float)
    return 0.5 * float(qdot @ mass_matrix(model, q) @ qdot)


def step(model: RobotModel, state: JointState, tau_total, tau_ext, dt: float) -> JointState:
    """Advance the plant one RK4 step; torques are zero-order-held over dt.

    Joint friction is evaluated inside every integrator stage: it is part of
    the plant, not of the controller.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    tau_total = np.asarray(tau_total, dtype=float)
    tau_ext = np.asarray(tau_ext, dtype=float)
    if tau_total.shape != (model.n,) or tau_ext.shape != (model.n,):
        raise ValueError(f"torque vectors must have shape ({model.n},)")
    try:
        q_new, qd_new = _kernels.rk4_step(
            model.dh,
            model.masses,
            model.coms,
            model.inertias,
            model.viscous,
            model.coulomb,
            model.v_eps,
            model.gravity,
            state.q,
            state.qdot,
            tau_total,
            tau_ext,
            dt,
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - SPD M makes this unreachable
        raise SingularDynamicsError(str(exc)) from exc
    return JointState(q=q_new, qdot=qd_new, t=state.t + dt)
