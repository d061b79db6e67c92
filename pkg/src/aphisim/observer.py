"""Lumped-disturbance observer.

Two first-order filter banks track the generalized velocity and the
mass-normalized control wrench; their mismatch yields an estimate of the
lumped disturbance (external wrench plus model error) that the control
law cancels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import VehicleParams, coriolis_vector, euler_rate_map, gravity_vector


@dataclass(frozen=True, eq=False)
class ObserverGains:
    """Per-axis filter gains, stored as the diagonals of the gain matrices.

    ``gamma_zeta`` and ``gamma_chi`` must be positive; ``mu`` entries must
    lie in (0, 1). The per-axis filter time constant is ``mu_i / gamma_i``.
    """

    gamma_zeta: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 1.0, 1.0, 0.10, 0.10, 0.50])
    )
    gamma_chi: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 1.0, 1.0, 0.10, 0.10, 0.50])
    )
    mu: np.ndarray = field(
        default_factory=lambda: np.array([0.95, 0.95, 0.95, 0.80, 0.80, 0.95])
    )

    def __post_init__(self):
        for name in ("gamma_zeta", "gamma_chi", "mu"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(6))
        if np.any(self.gamma_zeta <= 0) or np.any(self.gamma_chi <= 0):
            raise ValueError("observer gain diagonals must be positive")
        if np.any(self.mu <= 0) or np.any(self.mu >= 1):
            raise ValueError("mu entries must lie in (0, 1)")

    @property
    def zeta_rate(self) -> np.ndarray:
        """Per-axis inverse time constant of the velocity filter."""
        return self.gamma_zeta / self.mu

    @property
    def chi_rate(self) -> np.ndarray:
        """Per-axis inverse time constant of the wrench filter."""
        return self.gamma_chi / self.mu


@dataclass
class ObserverState:
    """Filtered velocity ``zeta`` and filtered normalized wrench ``chi``."""

    zeta: np.ndarray
    chi: np.ndarray

    def __post_init__(self):
        self.zeta = np.asarray(self.zeta, dtype=float).reshape(6)
        self.chi = np.asarray(self.chi, dtype=float).reshape(6)
        if not (np.all(np.isfinite(self.zeta)) and np.all(np.isfinite(self.chi))):
            raise ValueError("observer state must be finite")

    def copy(self) -> "ObserverState":
        return ObserverState(self.zeta.copy(), self.chi.copy())


def disturbance_estimate(
    obs: ObserverState,
    q_dot: np.ndarray,
    phi: np.ndarray,
    nominal: VehicleParams,
    gains: ObserverGains,
) -> np.ndarray:
    """Current lumped-disturbance estimate.

    ``d_hat = -M_hat(phi) (mu^-1 Gamma_zeta (zeta - q_dot) + chi)
    + C_hat(phi, phi_dot) + G_hat``.
    """
    v = gains.zeta_rate * (obs.zeta - q_dot) + obs.chi
    Q = euler_rate_map(phi)
    d_hat = np.empty(6)
    d_hat[:3] = -nominal.m * v[:3]
    d_hat[3:] = -(Q.T @ (nominal.J @ (Q @ v[3:])))
    return (
        d_hat
        + coriolis_vector(phi, q_dot[3:], nominal)
        + gravity_vector(nominal)
    )


def observer_rates(
    obs: ObserverState,
    q_dot: np.ndarray,
    tau: np.ndarray,
    phi: np.ndarray,
    nominal: VehicleParams,
    gains: ObserverGains,
) -> tuple[np.ndarray, np.ndarray]:
    """Filter state derivatives (zeta_dot, chi_dot) for the given inputs."""
    zeta_dot = -gains.zeta_rate * (obs.zeta - q_dot)
    Q = euler_rate_map(phi)
    m_inv_tau = np.empty(6)
    m_inv_tau[:3] = np.asarray(tau[:3], dtype=float) / nominal.m
    m_inv_tau[3:] = np.linalg.solve(Q.T @ nominal.J @ Q, np.asarray(tau[3:], dtype=float))
    chi_dot = -gains.chi_rate * (obs.chi - m_inv_tau)
    return zeta_dot, chi_dot
