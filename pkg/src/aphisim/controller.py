"""Observer-compensated tracking control law and the comparison baselines."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    VehicleParams,
    coriolis_vector,
    euler_rate_map,
    gravity_vector,
    wrench_to_thrust,
)


@dataclass(frozen=True, eq=False)
class ControllerGains:
    """Diagonals of the proportional and derivative gain matrices."""

    kp: np.ndarray = field(
        default_factory=lambda: np.array([6.0, 6.0, 8.0, 70.0, 70.0, 55.0])
    )
    kd: np.ndarray = field(
        default_factory=lambda: np.array([4.0, 4.0, 5.0, 30.0, 30.0, 15.0])
    )

    def __post_init__(self):
        object.__setattr__(self, "kp", np.asarray(self.kp, dtype=float).reshape(6))
        object.__setattr__(self, "kd", np.asarray(self.kd, dtype=float).reshape(6))
        if np.any(self.kp <= 0) or np.any(self.kd <= 0):
            raise ValueError("controller gain diagonals must be positive")


class ControllerVariant(enum.Enum):
    """Which control stack a run uses."""

    NO_FILTER = "no_filter"
    DIRECT_CLAMP = "direct_clamp"
    SAFETY_FILTER = "safety_filter"


def control_wrench(
    q: np.ndarray,
    q_dot: np.ndarray,
    q_d: np.ndarray,
    q_d_dot: np.ndarray,
    d_hat: np.ndarray,
    nominal: VehicleParams,
    gains: ControllerGains,
) -> np.ndarray:
    """PD tracking wrench with gravity/velocity terms and disturbance cancel.

    ``tau = M_hat(phi) (Kd e_dot + Kp e) + C_hat + G_hat - d_hat`` with
    ``e = q_d - q``.
    """
    phi = np.asarray(q, dtype=float)[3:]
    e = np.asarray(q_d, dtype=float) - q
    e_dot = np.asarray(q_d_dot, dtype=float) - q_dot
    v = gains.kd * e_dot + gains.kp * e
    Q = euler_rate_map(phi)
    tau = np.empty(6)
    tau[:3] = nominal.m * v[:3]
    tau[3:] = Q.T @ (nominal.J @ (Q @ v[3:]))
    return (
        tau
        + coriolis_vector(phi, q_dot[3:], nominal)
        + gravity_vector(nominal)
        - np.asarray(d_hat, dtype=float)
    )


def commanded_thrusts(
    q: np.ndarray,
    q_dot: np.ndarray,
    q_d: np.ndarray,
    q_d_dot: np.ndarray,
    d_hat: np.ndarray,
    nominal: VehicleParams,
    gains: ControllerGains,
) -> np.ndarray:
    """Motor thrusts realizing the tracking wrench."""
    tau = control_wrench(q, q_dot, q_d, q_d_dot, d_hat, nominal, gains)
    return wrench_to_thrust(tau, q[3:], nominal)


def baseline_direct_clamp(
    q: np.ndarray,
    q_dot: np.ndarray,
    q_t: np.ndarray,
    d_hat: np.ndarray,
    nominal: VehicleParams,
    gains: ControllerGains,
    t_min: float,
    t_max: float,
) -> np.ndarray:
    """Baseline that tracks the raw target and clips each motor thrust.

    The tracking wrench is computed against the target pose directly (with
    zero desired velocity, since no desired trajectory exists), converted
    to thrusts, and clamped elementwise into ``[t_min, t_max]``.
    """
    T = commanded_thrusts(q, q_dot, q_t, np.zeros(6), d_hat, nominal, gains)
    return np.clip(T, t_min, t_max)
