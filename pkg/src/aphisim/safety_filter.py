"""Thrust-limit safety filter.

Keeps every motor thrust inside ``[t_min, t_max]`` by minimally adjusting
the desired acceleration of the pose trajectory. Six barrier functions
(one per motor) are defined on the commanded thrusts; a small QP picks the
desired acceleration closest to a target acceleration while keeping the
barriers' decrease conditions satisfied. A per-barrier residual estimator
compensates the unknown contribution of the disturbance-estimate error to
the barrier rate.

The augmented state is the 36-vector
``x = [q; q_dot; zeta; chi; q_d; q_d_dot]``
combining the vehicle, the observer filters, and the desired trajectory.
Because the observer terms cancel the model's gravity/velocity feedforward
inside the control law, the commanded thrusts reduce to
``T(x) = J_a(phi) v(x)`` with ``J_a = Xi^-1 B^-1(phi) M_hat(phi)`` and
``v = Kd (q_d_dot - q_dot) + Kp (q_d - q) + mu^-1 Gamma_zeta (zeta - q_dot)
+ chi``; all state derivatives of ``T`` follow from that product form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qp_solver
from .controller import ControllerGains
from .dynamics import (
    VehicleParams,
    allocation_matrix,
    euler_rate_map,
    euler_rate_map_partials,
    rotation_matrix,
    rotation_partials,
)
from .observer import ObserverGains


@dataclass(frozen=True, eq=False)
class BarrierConfig:
    """Thrust bounds and the per-motor barrier/estimator constants."""

    t_min: float = 1.0
    t_max: float = 15.0
    gamma: np.ndarray = field(default_factory=lambda: np.full(6, 10.0))
    k_beta: np.ndarray = field(default_factory=lambda: np.full(6, 10.1))
    sigma: np.ndarray = field(default_factory=lambda: np.full(6, 15.0))

    def __post_init__(self):
        for name in ("gamma", "k_beta", "sigma"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).reshape(6))
        if not self.t_min < self.t_max:
            raise ValueError(f"t_min ({self.t_min}) must be below t_max ({self.t_max})")
        if np.any(self.gamma <= 0):
            raise ValueError("gamma entries must be positive")
        if np.any(self.k_beta <= self.gamma):
            raise ValueError("k_beta entries must exceed the matching gamma")
        if np.any(self.sigma <= 0):
            raise ValueError("sigma entries must be positive")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t_max + self.t_min)

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.t_max - self.t_min)


@dataclass(frozen=True, eq=False)
class TargetGenConfig:
    """Second-order target-acceleration shaping with variable damping."""

    k_a: np.ndarray = field(
        default_factory=lambda: np.array([1.0, 1.0, 1.0, 5.0, 5.0, 1.0])
    )
    delta_min: float = 1.0
    delta_max: float = 5.0
    k_dp: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "k_a", np.asarray(self.k_a, dtype=float).reshape(6))
        if np.any(self.k_a <= 0):
            raise ValueError("k_a entries must be positive")
        if not 0 < self.delta_min <= self.delta_max:
            raise ValueError("need 0 < delta_min <= delta_max")
        if self.k_dp < 0:
            raise ValueError("k_dp must be nonnegative")


@dataclass
class ResidualState:
    """Integrator state of the per-barrier residual estimator."""

    xi: np.ndarray

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float).reshape(6)
        if not np.all(np.isfinite(self.xi)):
            raise ValueError("xi must be finite")

    def copy(self) -> "ResidualState":
        return ResidualState(self.xi.copy())


@dataclass
class AugmentedState:
    """36-vector ``[q; q_dot; zeta; chi; q_d; q_d_dot]`` with named slices."""

    x: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float).reshape(36)
        if not np.all(np.isfinite(self.x)):
            raise ValueError("augmented state must be finite")
        if abs(self.x[4]) >= np.pi / 2:
            raise ValueError("pitch outside (-pi/2, pi/2)")

    @classmethod
    def from_parts(cls, q, q_dot, zeta, chi, q_d, q_d_dot) -> "AugmentedState":
        return cls(np.concatenate([q, q_dot, zeta, chi, q_d, q_d_dot]))

    @property
    def q(self) -> np.ndarray:
        return self.x[0:6]

    @property
    def q_dot(self) -> np.ndarray:
        return self.x[6:12]

    @property
    def zeta(self) -> np.ndarray:
        return self.x[12:18]

    @property
    def chi(self) -> np.ndarray:
        return self.x[18:24]

    @property
    def q_d(self) -> np.ndarray:
        return self.x[24:30]

    @property
    def q_d_dot(self) -> np.ndarray:
        return self.x[30:36]


class FilterContext:
    """Precomputed gains and allocation inverse shared by the filter math.

    Building one of these per run (rather than per call) keeps the per-step
    cost down; all members are read-only after construction.
    """

    def __init__(
        self,
        nominal: VehicleParams,
        ctrl_gains: ControllerGains,
        obs_gains: ObserverGains,
        barrier: BarrierConfig,
    ):
        self.nominal = nominal
        self.ctrl = ctrl_gains
        self.obs = obs_gains
        self.barrier = barrier
        self.xi_inv = np.linalg.inv(allocation_matrix(nominal))
        # Gain-folded allocation blocks: J_a(phi) = [lm @ R^T | rj @ Q].
        self._xi_inv_lm = np.ascontiguousarray(self.xi_inv[:, :3] * nominal.m)
        self._xi_inv_rj = np.ascontiguousarray(self.xi_inv[:, 3:] @ nominal.J)
        self.kp = ctrl_gains.kp
        self.kd = ctrl_gains.kd
        self.zeta_rate = obs_gains.zeta_rate
        self.chi_rate = obs_gains.chi_rate

    def ja(self, phi: np.ndarray) -> np.ndarray:
        """Thrust sensitivity J_a(phi) = Xi^-1 blkdiag(m R^T, J Q)."""
        R = rotation_matrix(phi)
        Q = euler_rate_map(phi)
        return self._ja_from_rq(R, Q)

    def _ja_from_rq(self, R: np.ndarray, Q: np.ndarray) -> np.ndarray:
        out = np.empty((6, 6))
        np.matmul(self._xi_inv_lm, R.T, out=out[:, :3])
        np.matmul(self._xi_inv_rj, Q, out=out[:, 3:])
        return out

    def _dja_cols_times(self, phi: np.ndarray, vec: np.ndarray) -> np.ndarray:
        """Columns (dJ_a/dphi_i) @ vec for roll, pitch, yaw, as a 6x3 block."""
        dR_r, dR_p, dR_y = rotation_partials(phi)
        dQ_r, dQ_p = euler_rate_map_partials(phi)
        v_t, v_r = vec[:3], vec[3:]
        # Column i is lm (dR_i^T v_t) + rj (dQ_i v_r); the yaw column has no
        # Q contribution.
        trans = np.empty((3, 3))
        trans[:, 0] = v_t @ dR_r
        trans[:, 1] = v_t @ dR_p
        trans[:, 2] = v_t @ dR_y
        rot = np.zeros((3, 3))
        rot[:, 0] = dQ_r @ v_r
        rot[:, 1] = dQ_p @ v_r
        return self._xi_inv_lm @ trans + self._xi_inv_rj @ rot


def tracking_velocity_term(x: np.ndarray, ctx: FilterContext) -> np.ndarray:
    """The gain-weighted feedback vector v(x) with T(x) = J_a(phi) v(x)."""
    q, q_dot = x[0:6], x[6:12]
    zeta, chi = x[12:18], x[18:24]
    q_d, q_d_dot = x[24:30], x[30:36]
    return (
        ctx.kd * (q_d_dot - q_dot)
        + ctx.kp * (q_d - q)
        + ctx.zeta_rate * (zeta - q_dot)
        + chi
    )


def thrusts_from_state(x: np.ndarray, ctx: FilterContext) -> np.ndarray:
    """Commanded motor thrusts as a function of the augmented state."""
    return ctx.ja(x[3:6]) @ tracking_velocity_term(x, ctx)


def barrier_values(T: np.ndarray, cfg: BarrierConfig) -> np.ndarray:
    """Barrier h_i = halfwidth^2 - (T_i - midpoint)^2, nonnegative in bounds."""
    d = np.asarray(T, dtype=float) - cfg.midpoint
    return cfg.halfwidth**2 - d * d


def drift(x: np.ndarray, ctx: FilterContext) -> np.ndarray:
    """Drift field of the augmented closed-loop model (zero-disturbance)."""
    q, q_dot = x[0:6], x[6:12]
    zeta, chi = x[12:18], x[18:24]
    q_d, q_d_dot = x[24:30], x[30:36]
    a_e = ctx.kd * (q_d_dot - q_dot) + ctx.kp * (q_d - q)
    zeta_mis = ctx.zeta_rate * (zeta - q_dot)
    f = np.empty(36)
    f[0:6] = q_dot
    f[6:12] = a_e
    f[12:18] = -zeta_mis
    f[18:24] = ctx.chi_rate * (a_e + zeta_mis)
    f[24:30] = q_d_dot
    f[30:36] = 0.0
    return f


def thrust_state_jacobian(x: np.ndarray, ctx: FilterContext) -> np.ndarray:
    """Full 6x36 Jacobian of the commanded thrusts w.r.t. the augmented state.

    Block structure (columns in state order): the attitude-dependent part
    of dT/dq sits in the Euler-angle columns; every other block is J_a
    times a diagonal gain.
    """
    phi = x[3:6]
    ja = ctx.ja(phi)
    v = tracking_velocity_term(x, ctx)
    jac = np.empty((6, 36))
    jac[:, 0:6] = -ja * ctx.kp[None, :]
    jac[:, 3:6] += ctx._dja_cols_times(phi, v)
    jac[:, 6:12] = -ja * (ctx.kd + ctx.zeta_rate)[None, :]
    jac[:, 12:18] = ja * ctx.zeta_rate[None, :]
    jac[:, 18:24] = ja
    jac[:, 24:30] = ja * ctx.kp[None, :]
    jac[:, 30:36] = ja * ctx.kd[None, :]
    return jac


def _lie_terms(
    x: np.ndarray, ctx: FilterContext
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Shared fast path: returns (T, h, Lf, prefactor, J_a).

    ``prefactor`` is the common row scale -2*(T_i - midpoint); the i-th row
    of L_g h is ``prefactor_i * (J_a Kd)_i``.
    """
    q, q_dot = x[0:6], x[6:12]
    zeta, chi = x[12:18], x[18:24]
    q_d, q_d_dot = x[24:30], x[30:36]
    phi = q[3:6]

    ja = ctx.ja(phi)
    e_dot = q_d_dot - q_dot
    v = ctx.kd * e_dot + ctx.kp * (q_d - q) + ctx.zeta_rate * (zeta - q_dot) + chi
    T = ja @ v

    a_e = ctx.kd * e_dot + ctx.kp * (q_d - q)
    zeta_mis = ctx.zeta_rate * (zeta - q_dot)
    f_zeta = -zeta_mis
    f_chi = ctx.chi_rate * (a_e + zeta_mis)
    # (dT/dx) f(x) without forming the 6x36 Jacobian: collect the J_a factors
    # and add the attitude-rate contribution of dJ_a/dphi.
    inner = (
        ctx.kp * e_dot
        - (ctx.kd + ctx.zeta_rate) * a_e
        + ctx.zeta_rate * f_zeta
        + f_chi
    )
    dT_f = ja @ inner + ctx._dja_cols_times(phi, v) @ q_dot[3:6]

    pref = -2.0 * (T - ctx.barrier.midpoint)
    h = ctx.barrier.halfwidth**2 - (T - ctx.barrier.midpoint) ** 2
    lf = pref * dT_f
    return T, h, lf, pref, ja


def lie_derivatives(
    x: np.ndarray, ctx: FilterContext
) -> tuple[np.ndarray, np.ndarray]:
    """Barrier rates along the drift and input directions.

    Returns ``(Lf_h, Lg_h)`` where ``Lf_h[i]`` is the drift contribution to
    ``h_i`` and row ``i`` of the 6x6 ``Lg_h`` maps the desired acceleration
    into the rate of ``h_i``.
    """
    _, _, lf, pref, ja = _lie_terms(x, ctx)
    lg = pref[:, None] * (ja * ctx.kd[None, :])
    return lf, lg


def residual_estimate(
    x: np.ndarray, res: ResidualState, ctx: FilterContext
) -> np.ndarray:
    """Current estimate of the disturbance-error term in each barrier rate."""
    T = thrusts_from_state(x, ctx)
    return ctx.barrier.k_beta * barrier_values(T, ctx.barrier) - res.xi


def beta_hat_from_h(h: np.ndarray, xi: np.ndarray, cfg: BarrierConfig) -> np.ndarray:
    """Residual estimate when the barrier values are already known."""
    return cfg.k_beta * h - xi


def initial_residual(x: np.ndarray, ctx: FilterContext) -> ResidualState:
    """Residual state with beta_hat(t0) = 0: xi = k_beta * h(x(t0))."""
    T = thrusts_from_state(x, ctx)
    return ResidualState(ctx.barrier.k_beta * barrier_values(T, ctx.barrier))


def residual_state_rate(
    x: np.ndarray,
    res: ResidualState,
    q_dd_d: np.ndarray,
    ctx: FilterContext,
) -> np.ndarray:
    """xi_dot = k_beta * (Lf_h + Lg_h q_dd_d + beta_hat), elementwise."""
    _, h, lf, pref, ja = _lie_terms(x, ctx)
    lg_u = pref * (ja @ (ctx.kd * np.asarray(q_dd_d, dtype=float)))
    beta_hat = beta_hat_from_h(h, res.xi, ctx.barrier)
    return ctx.barrier.k_beta * (lf + lg_u + beta_hat)


def target_acceleration(
    q_t: np.ndarray,
    q_d: np.ndarray,
    q_d_dot: np.ndarray,
    gen: TargetGenConfig,
) -> np.ndarray:
    """Damped second-order pull of the desired pose toward the target.

    The damping ratio grows from ``delta_min`` toward ``delta_max`` as the
    desired pose falls behind the target, which suppresses oscillation of
    the desired trajectory during long pushes.
    """
    q_t = np.asarray(q_t, dtype=float)
    q_d = np.asarray(q_d, dtype=float)
    q_d_dot = np.asarray(q_d_dot, dtype=float)
    gap = np.abs(q_d - q_t)
    blend = gen.k_dp * gap / (1.0 + gen.k_dp * gap)
    delta_v = gen.delta_min + blend * (gen.delta_max - gen.delta_min)
    return -2.0 * gen.k_a * delta_v * q_d_dot + gen.k_a**2 * (q_t - q_d)


def variable_damping(q_t, q_d, gen: TargetGenConfig) -> np.ndarray:
    """Per-axis damping ratio used by :func:`target_acceleration`."""
    gap = np.abs(np.asarray(q_d, dtype=float) - np.asarray(q_t, dtype=float))
    blend = gen.k_dp * gap / (1.0 + gen.k_dp * gap)
    return gen.delta_min + blend * (gen.delta_max - gen.delta_min)


def assemble_qp(
    x: np.ndarray,
    res: ResidualState,
    q_dd_t: np.ndarray,
    ctx: FilterContext,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Constraint system of the safety QP.

    Returns ``(A, b, u_t)`` for ``min ||u - u_t||^2 s.t. A u <= b`` where
    each row demands that a barrier's robustified decrease condition hold:
    ``A = -Lg_h`` and ``b_i = gamma_i h_i + Lf_h_i + beta_hat_i - sigma_i``.
    """
    _, h, lf, pref, ja = _lie_terms(x, ctx)
    lg = pref[:, None] * (ja * ctx.kd[None, :])
    beta_hat = beta_hat_from_h(h, res.xi, ctx.barrier)
    b_hat = ctx.barrier.gamma * h + lf + beta_hat
    return -lg, b_hat - ctx.barrier.sigma, np.asarray(q_dd_t, dtype=float)


def filter_step(
    x: np.ndarray,
    res: ResidualState,
    q_t: np.ndarray,
    ctx: FilterContext,
    gen: TargetGenConfig,
    warm_start: list[int] | None = None,
) -> tuple[np.ndarray, qp_solver.QpSolution]:
    """One safety-filter evaluation: desired acceleration plus QP status.

    The QP projects the target acceleration onto the set of accelerations
    keeping all thrust barriers decreasing no faster than allowed. If the
    discretized problem is ever infeasible, the step falls back to a
    slack-relaxed solve (flagged via the returned status) rather than
    aborting the trajectory.
    """
    q_dd_t = target_acceleration(q_t, x[24:30], x[30:36], gen)
    A, b, u_t = assemble_qp(x, res, q_dd_t, ctx)
    problem = qp_solver.QpProblem(u_t=u_t, A=A, b=b)
    try:
        sol = qp_solver.solve(problem, initial_active=warm_start)
    except qp_solver.Infeasible:
        sol = qp_solver.solve_relaxed(problem)
    return sol.u, sol
