"""Rigid-body model of the aerial manipulator.

The vehicle is a fully actuated hexarotor (six motors tilted by a fixed
angle) with a rigidly attached arm whose mass and inertia are lumped into
the body. Generalized coordinates are ``q = [p; phi]`` with ``p`` the
world-frame position and ``phi = [roll; pitch; yaw]`` ZYX Euler angles;
the world-to-body rotation is ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)`` and
``Q`` maps Euler-angle rates to body angular velocity, ``omega = Q @ phi_dot``.

The same functions serve both the true plant and the nominal model used by
the controller and observer; only the parameter set differs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonInvertibleAllocation, SingularAttitude

# Pitch values this close to +/- pi/2 are treated as gimbal lock.
PITCH_MARGIN = 1e-6
_PITCH_LIMIT = np.pi / 2 - PITCH_MARGIN


@dataclass(frozen=True, eq=False)
class VehicleParams:
    """Physical constants of the vehicle (true plant or nominal model).

    Attributes
    ----------
    m : float
        Total mass (kg).
    J : np.ndarray
        3x3 inertia matrix about the body origin (kg m^2), symmetric
        positive definite.
    L : float
        Distance from the body origin to each propeller (m).
    alpha : float
        Fixed motor tilt angle (rad), in (0, pi/2).
    k_f : float
        Thrust-to-torque coefficient of the propellers (m).
    g : float
        Gravitational acceleration (m/s^2).
    """

    m: float = 3.50
    J: np.ndarray = field(default_factory=lambda: np.diag([0.035, 0.035, 0.045]))
    L: float = 0.275
    alpha: float = np.deg2rad(15.0)
    k_f: float = 0.016
    g: float = 9.81

    def __post_init__(self):
        object.__setattr__(self, "J", np.asarray(self.J, dtype=float))
        if self.m <= 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if self.J.shape != (3, 3):
            raise ValueError(f"J must be 3x3, got {self.J.shape}")
        if not np.allclose(self.J, self.J.T, atol=1e-12):
            raise ValueError("J must be symmetric")
        if np.any(np.linalg.eigvalsh(self.J) <= 0):
            raise ValueError("J must be positive definite")
        if not 0.0 < self.alpha < np.pi / 2:
            raise ValueError(f"alpha must be in (0, pi/2), got {self.alpha}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.k_f <= 0:
            raise ValueError(f"k_f must be positive, got {self.k_f}")
        if self.g <= 0:
            raise ValueError(f"g must be positive, got {self.g}")

    @property
    def p1(self) -> float:
        """Roll/pitch moment arm: L*cos(alpha) + k_f*sin(alpha)."""
        return self.L * np.cos(self.alpha) + self.k_f * np.sin(self.alpha)

    @property
    def p2(self) -> float:
        """Yaw moment arm: L*sin(alpha) - k_f*cos(alpha)."""
        return self.L * np.sin(self.alpha) - self.k_f * np.cos(self.alpha)

    def scaled(self, m_scale: float = 1.0, j_scale: float = 1.0) -> "VehicleParams":
        """Copy with mass and inertia scaled (model-mismatch studies)."""
        return VehicleParams(
            m=self.m * m_scale,
            J=self.J * j_scale,
            L=self.L,
            alpha=self.alpha,
            k_f=self.k_f,
            g=self.g,
        )


def nominal_params() -> VehicleParams:
    """Stock nominal model constants used by the controller and observer."""
    return VehicleParams()


def default_plant_params() -> VehicleParams:
    """Default true plant: nominal with +5% mass and +10% inertia."""
    return nominal_params().scaled(m_scale=1.05, j_scale=1.10)


@dataclass
class PlantState:
    """Generalized position ``q = [p; phi]`` and velocity ``q_dot``."""

    q: np.ndarray
    q_dot: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(6)
        self.q_dot = np.asarray(self.q_dot, dtype=float).reshape(6)
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.q_dot))):
            raise ValueError("plant state must be finite")
        if abs(self.q[4]) >= np.pi / 2:
            raise ValueError(f"pitch {self.q[4]} outside (-pi/2, pi/2)")

    @property
    def p(self) -> np.ndarray:
        return self.q[:3]

    @property
    def phi(self) -> np.ndarray:
        return self.q[3:]

    @property
    def phi_dot(self) -> np.ndarray:
        return self.q_dot[3:]

    def copy(self) -> "PlantState":
        return PlantState(self.q.copy(), self.q_dot.copy())


def _check_pitch(phi: np.ndarray) -> None:
    if abs(phi[1]) > _PITCH_LIMIT:
        raise SingularAttitude(
            f"pitch {phi[1]:.9f} rad within {PITCH_MARGIN} of +/- pi/2"
        )


def skew(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix such that skew(a) @ b == cross(a, b)."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product of two 3-vectors (faster than np.cross for scalars)."""
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


def rotation_matrix(phi: np.ndarray) -> np.ndarray:
    """World-from-body rotation for ZYX Euler angles [roll, pitch, yaw]."""
    sr, cr = math.sin(phi[0]), math.cos(phi[0])
    sp, cp = math.sin(phi[1]), math.cos(phi[1])
    sy, cy = math.sin(phi[2]), math.cos(phi[2])
    R = np.empty((3, 3))
    R[0, 0] = cy * cp
    R[0, 1] = cy * sp * sr - sy * cr
    R[0, 2] = cy * sp * cr + sy * sr
    R[1, 0] = sy * cp
    R[1, 1] = sy * sp * sr + cy * cr
    R[1, 2] = sy * sp * cr - cy * sr
    R[2, 0] = -sp
    R[2, 1] = cp * sr
    R[2, 2] = cp * cr
    return R


def rotation_partials(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Partial derivatives of ``rotation_matrix`` w.r.t. roll, pitch, yaw."""
    sr, cr = math.sin(phi[0]), math.cos(phi[0])
    sp, cp = math.sin(phi[1]), math.cos(phi[1])
    sy, cy = math.sin(phi[2]), math.cos(phi[2])
    d = np.zeros((3, 3, 3))
    d_roll, d_pitch, d_yaw = d[0], d[1], d[2]
    d_roll[0, 1] = cy * sp * cr + sy * sr
    d_roll[0, 2] = -cy * sp * sr + sy * cr
    d_roll[1, 1] = sy * sp * cr - cy * sr
    d_roll[1, 2] = -sy * sp * sr - cy * cr
    d_roll[2, 1] = cp * cr
    d_roll[2, 2] = -cp * sr
    d_pitch[0, 0] = -cy * sp
    d_pitch[0, 1] = cy * cp * sr
    d_pitch[0, 2] = cy * cp * cr
    d_pitch[1, 0] = -sy * sp
    d_pitch[1, 1] = sy * cp * sr
    d_pitch[1, 2] = sy * cp * cr
    d_pitch[2, 0] = -cp
    d_pitch[2, 1] = -sp * sr
    d_pitch[2, 2] = -sp * cr
    d_yaw[0, 0] = -sy * cp
    d_yaw[0, 1] = -sy * sp * sr - cy * cr
    d_yaw[0, 2] = -sy * sp * cr + cy * sr
    d_yaw[1, 0] = cy * cp
    d_yaw[1, 1] = cy * sp * sr - sy * cr
    d_yaw[1, 2] = cy * sp * cr + sy * sr
    return d_roll, d_pitch, d_yaw


def euler_rate_map(phi: np.ndarray) -> np.ndarray:
    """Map Q with ``omega_body = Q @ phi_dot`` for ZYX Euler angles.

    Raises
    ------
    SingularAttitude
        If the pitch angle is within ``PITCH_MARGIN`` of +/- pi/2.
    """
    _check_pitch(phi)
    sr, cr = math.sin(phi[0]), math.cos(phi[0])
    sp, cp = math.sin(phi[1]), math.cos(phi[1])
    Q = np.zeros((3, 3))
    Q[0, 0] = 1.0
    Q[0, 2] = -sp
    Q[1, 1] = cr
    Q[1, 2] = sr * cp
    Q[2, 1] = -sr
    Q[2, 2] = cr * cp
    return Q


def euler_rate_map_dot(phi: np.ndarray, phi_dot: np.ndarray) -> np.ndarray:
    """Time derivative of Q along (phi, phi_dot)."""
    _check_pitch(phi)
    sr, cr = math.sin(phi[0]), math.cos(phi[0])
    sp, cp = math.sin(phi[1]), math.cos(phi[1])
    dr, dp = phi_dot[0], phi_dot[1]
    Qd = np.zeros((3, 3))
    Qd[0, 2] = -cp * dp
    Qd[1, 1] = -sr * dr
    Qd[1, 2] = cr * dr * cp - sr * sp * dp
    Qd[2, 1] = -cr * dr
    Qd[2, 2] = -sr * dr * cp - cr * sp * dp
    return Qd


def euler_rate_map_inv(phi: np.ndarray) -> np.ndarray:
    """Analytic inverse of Q (singular only at gimbal lock)."""
    _check_pitch(phi)
    sr, cr = math.sin(phi[0]), math.cos(phi[0])
    sp, cp = math.sin(phi[1]), math.cos(phi[1])
    tp = sp / cp
    Qi = np.zeros((3, 3))
    Qi[0, 0] = 1.0
    Qi[0, 1] = sr * tp
    Qi[0, 2] = cr * tp
    Qi[1, 1] = cr
    Qi[1, 2] = -sr
    Qi[2, 1] = sr / cp
    Qi[2, 2] = cr / cp
    return Qi


def euler_rate_map_partials(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partial derivatives of Q w.r.t. roll and pitch (Q has no yaw term)."""
    sr, cr = math.sin(phi[0]), math.cos(phi[0])
    sp, cp = math.sin(phi[1]), math.cos(phi[1])
    d = np.zeros((2, 3, 3))
    d_roll, d_pitch = d[0], d[1]
    d_roll[1, 1] = -sr
    d_roll[1, 2] = cr * cp
    d_roll[2, 1] = -cr
    d_roll[2, 2] = -sr * cp
    d_pitch[0, 2] = -cp
    d_pitch[1, 2] = -sr * sp
    d_pitch[2, 2] = -cr * sp
    return d_roll, d_pitch


def mass_matrix(phi: np.ndarray, params: VehicleParams) -> np.ndarray:
    """Generalized mass matrix blkdiag(m*I3, Q^T J Q)."""
    Q = euler_rate_map(phi)
    M = np.zeros((6, 6))
    M[0, 0] = M[1, 1] = M[2, 2] = params.m
    M[3:, 3:] = Q.T @ params.J @ Q
    return M


def coriolis_rot(
    Q: np.ndarray, Q_dot: np.ndarray, phi_dot: np.ndarray, J: np.ndarray
) -> np.ndarray:
    """Rotational velocity-product force given precomputed Q and Q_dot."""
    omega = Q @ phi_dot
    return Q.T @ (J @ (Q_dot @ phi_dot) + cross3(omega, J @ omega))


def coriolis_vector(
    phi: np.ndarray, phi_dot: np.ndarray, params: VehicleParams
) -> np.ndarray:
    """Velocity-product generalized force; translational block is zero."""
    Q = euler_rate_map(phi)
    Qd = euler_rate_map_dot(phi, phi_dot)
    out = np.zeros(6)
    out[3:] = coriolis_rot(Q, Qd, phi_dot, params.J)
    return out


def gravity_vector(params: VehicleParams) -> np.ndarray:
    """Generalized gravity force [0, 0, m*g, 0, 0, 0]."""
    out = np.zeros(6)
    out[2] = params.m * params.g
    return out


def allocation_matrix(params: VehicleParams) -> np.ndarray:
    """Constant 6x6 map from motor thrusts to body-frame wrench.

    Rows 1-3 give body-frame force, rows 4-6 body-frame torque, for the
    six tilted motors arranged at 60-degree spacing.

    Raises
    ------
    NonInvertibleAllocation
        If the matrix condition number exceeds 1e12 for these parameters.
    """
    sa, ca = np.sin(params.alpha), np.cos(params.alpha)
    p1, p2 = params.p1, params.p2
    r3 = np.sqrt(3.0) / 2.0
    xi = np.array(
        [
            [0.5 * sa, -sa, 0.5 * sa, 0.5 * sa, -sa, 0.5 * sa],
            [-r3 * sa, 0.0, r3 * sa, -r3 * sa, 0.0, r3 * sa],
            [ca, ca, ca, ca, ca, ca],
            [-0.5 * p1, -p1, -0.5 * p1, 0.5 * p1, p1, 0.5 * p1],
            [r3 * p1, 0.0, -r3 * p1, -r3 * p1, 0.0, r3 * p1],
            [p2, -p2, p2, -p2, p2, -p2],
        ]
    )
    if np.linalg.cond(xi) > 1e12:
        raise NonInvertibleAllocation(
            f"allocation matrix condition number {np.linalg.cond(xi):.3e} > 1e12"
        )
    return xi


def input_matrix(phi: np.ndarray) -> np.ndarray:
    """B(phi) = blkdiag(R, Q^T) mapping body wrench to generalized wrench."""
    Q = euler_rate_map(phi)
    B = np.zeros((6, 6))
    B[:3, :3] = rotation_matrix(phi)
    B[3:, 3:] = Q.T
    return B


def thrust_to_wrench(
    T: np.ndarray, phi: np.ndarray, params: VehicleParams
) -> np.ndarray:
    """Generalized control wrench tau = B(phi) Xi T."""
    return input_matrix(phi) @ (allocation_matrix(params) @ np.asarray(T, dtype=float))


def wrench_to_thrust(
    tau: np.ndarray, phi: np.ndarray, params: VehicleParams
) -> np.ndarray:
    """Motor thrusts realizing a generalized wrench: T = Xi^-1 B^-1 tau."""
    body_wrench = np.linalg.solve(input_matrix(phi), np.asarray(tau, dtype=float))
    return np.linalg.solve(allocation_matrix(params), body_wrench)


def forward_dynamics(
    state: PlantState,
    tau: np.ndarray,
    tau_ext: np.ndarray,
    params: VehicleParams,
) -> np.ndarray:
    """Generalized acceleration from M(phi) q_dd + C + G = tau + tau_ext."""
    phi = state.phi
    rhs = (
        np.asarray(tau, dtype=float)
        + np.asarray(tau_ext, dtype=float)
        - coriolis_vector(phi, state.phi_dot, params)
        - gravity_vector(params)
    )
    # M is block diagonal: solve the translational and rotational parts apart.
    Q = euler_rate_map(phi)
    qdd = np.empty(6)
    qdd[:3] = rhs[:3] / params.m
    qdd[3:] = np.linalg.solve(Q.T @ params.J @ Q, rhs[3:])
    return qdd
