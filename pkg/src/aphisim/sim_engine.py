"""Deterministic fixed-step closed-loop simulator.

Composes the true plant, the disturbance observer, one of the controller
variants, the safety filter, and the environment wrenches. Commands
(thrusts and desired acceleration) are computed once per control step and
held while the continuous states are advanced jointly with classical RK4;
environment wrenches are re-evaluated inside every RK4 stage. One run is
single-threaded and fully determined by the scenario and seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import environment as env
from .controller import ControllerGains, ControllerVariant
from .dynamics import (
    PITCH_MARGIN,
    PlantState,
    VehicleParams,
    allocation_matrix,
    coriolis_rot,
    coriolis_vector,
    default_plant_params,
    euler_rate_map,
    euler_rate_map_dot,
    euler_rate_map_inv,
    gravity_vector,
    nominal_params,
    rotation_matrix,
)
from .errors import NumericalDivergence, SingularAttitude
from .observer import ObserverGains, ObserverState
from .safety_filter import (
    AugmentedState,
    BarrierConfig,
    FilterContext,
    ResidualState,
    TargetGenConfig,
    barrier_values,
    filter_step,
    initial_residual,
    residual_state_rate,
    target_acceleration,
)

_DIVERGENCE_LIMIT = 1e6
_PITCH_LIMIT = np.pi / 2 - PITCH_MARGIN

# Flat integration state layout.
_Q = slice(0, 6)
_QDOT = slice(6, 12)
_ZETA = slice(12, 18)
_CHI = slice(18, 24)
_XI = slice(24, 30)
_QD = slice(30, 36)
_QDDOT = slice(36, 42)
_CART_X = 42
_CART_V = 43
_NY = 44

_QP_OFF, _QP_OPTIMAL, _QP_RELAXED = 0, 1, 2
QP_STATUS_NAMES = {_QP_OFF: "off", _QP_OPTIMAL: "optimal", _QP_RELAXED: "relaxed"}


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete description of one closed-loop run."""

    name: str = "custom"
    duration: float = 10.0
    dt: float = 1e-3
    controller: ControllerVariant = ControllerVariant.SAFETY_FILTER
    seed: int = 0
    initial_q: np.ndarray = field(default_factory=lambda: np.zeros(6))
    initial_q_dot: np.ndarray = field(default_factory=lambda: np.zeros(6))
    target_schedule: tuple = ()
    plant: VehicleParams = field(default_factory=default_plant_params)
    nominal: VehicleParams = field(default_factory=nominal_params)
    ctrl_gains: ControllerGains = field(default_factory=ControllerGains)
    obs_gains: ObserverGains = field(default_factory=ObserverGains)
    barrier: BarrierConfig = field(default_factory=BarrierConfig)
    target_gen: TargetGenConfig = field(default_factory=TargetGenConfig)
    ee: env.EndEffectorConfig = field(default_factory=env.EndEffectorConfig)
    wall: Optional[env.WallConfig] = None
    plug: Optional[env.PlugConfig] = None
    cart: Optional[env.CartConfig] = None
    wind: Optional[env.WindConfig] = None

    def __post_init__(self):
        object.__setattr__(
            self, "initial_q", np.asarray(self.initial_q, dtype=float).reshape(6)
        )
        object.__setattr__(
            self,
            "initial_q_dot",
            np.asarray(self.initial_q_dot, dtype=float).reshape(6),
        )
        schedule = tuple(
            (float(t), np.asarray(qt, dtype=float).reshape(6))
            for t, qt in self.target_schedule
        )
        object.__setattr__(self, "target_schedule", schedule)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        times = [t for t, _ in schedule]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("target_schedule times must be non-decreasing")

    def target_at(self, t: float) -> np.ndarray:
        """Piecewise-constant target pose (zero-order hold on the schedule)."""
        current = self.initial_q
        for t_k, q_k in self.target_schedule:
            if t_k <= t:
                current = q_k
            else:
                break
        return current


@dataclass
class SimState:
    """Snapshot of everything the simulation integrates or latches."""

    plant: PlantState
    obs: ObserverState
    res: ResidualState
    q_d: np.ndarray
    q_d_dot: np.ndarray
    cart: Optional[tuple[float, float]]
    plug_attached: bool
    t: float
    rng: np.random.Generator

    def augmented(self) -> AugmentedState:
        return AugmentedState.from_parts(
            self.plant.q,
            self.plant.q_dot,
            self.obs.zeta,
            self.obs.chi,
            self.q_d,
            self.q_d_dot,
        )


@dataclass
class SimLog:
    """Per-step history of a run plus metadata needed to interpret it."""

    scenario_name: str
    controller: str
    dt: float
    seed: int
    t_min: float
    t_max: float
    t: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    q_d: np.ndarray
    q_t: np.ndarray
    T: np.ndarray
    T_raw: np.ndarray
    d_hat: np.ndarray
    h: np.ndarray
    qp_status: np.ndarray
    f_contact: np.ndarray
    cart_x: np.ndarray
    cart_v: np.ndarray
    aborted: bool = False
    abort_reason: Optional[str] = None

    @property
    def n_rows(self) -> int:
        return self.t.size


@dataclass
class MetricsReport:
    """Aggregate figures of merit computed from a SimLog."""

    rms_tracking_error: np.ndarray
    max_overshoot: np.ndarray
    steady_state_error: np.ndarray
    thrust_min: float
    thrust_max: float
    thrust_violation_steps: int
    relaxed_qp_steps: int
    breakaway_time: Optional[float]
    resettling_time: Optional[float]
    aborted: bool

    def as_dict(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for i in range(6):
            out[f"rms_tracking_error_{i + 1}"] = float(self.rms_tracking_error[i])
        for i in range(6):
            out[f"max_overshoot_{i + 1}"] = float(self.max_overshoot[i])
        for i in range(6):
            out[f"steady_state_error_{i + 1}"] = float(self.steady_state_error[i])
        out["thrust_min"] = float(self.thrust_min)
        out["thrust_max"] = float(self.thrust_max)
        out["thrust_violation_steps"] = float(self.thrust_violation_steps)
        out["relaxed_qp_steps"] = float(self.relaxed_qp_steps)
        out["breakaway_time"] = (
            float("nan") if self.breakaway_time is None else float(self.breakaway_time)
        )
        out["resettling_time"] = (
            float("nan")
            if self.resettling_time is None
            else float(self.resettling_time)
        )
        out["aborted"] = float(self.aborted)
        return out


def rk4_step(
    f: Callable[[float, np.ndarray], np.ndarray],
    t: float,
    y: np.ndarray,
    dt: float,
) -> np.ndarray:
    """One classical Runge-Kutta step of ``y' = f(t, y)``."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class Engine:
    """Stateless-per-step integrator bound to one scenario.

    Precomputes the allocation matrices and gain bundles so the per-step
    work is pure array math.
    """

    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.ctx = FilterContext(
            scenario.nominal, scenario.ctrl_gains, scenario.obs_gains, scenario.barrier
        )
        self.xi_plant = allocation_matrix(scenario.plant)
        self.xi_nominal = allocation_matrix(scenario.nominal)
        self.g_plant = gravity_vector(scenario.plant)
        self.g_nominal = gravity_vector(scenario.nominal)
        self.j_plant_inv = np.linalg.inv(scenario.plant.J)
        self.j_nominal_inv = np.linalg.inv(scenario.nominal.J)
        self._last_active: Optional[list[int]] = None
        # Body wrenches implied by the held thrusts, refreshed every step.
        self._bw_plant = np.zeros(6)
        self._bw_nominal = np.zeros(6)

    # ------------------------------------------------------------------
    # state packing

    def initial_state(self, seed: Optional[int] = None) -> SimState:
        sc = self.sc
        plant = PlantState(sc.initial_q.copy(), sc.initial_q_dot.copy())
        phi = plant.phi
        # Start the wrench filter on the current commanded wrench so the
        # initial disturbance estimate is zero and the initial thrusts are
        # the steady tracking thrusts (inside the safety set for any sane
        # scenario) rather than zero.
        tau0 = (
            coriolis_vector(phi, plant.phi_dot, sc.nominal) + self.g_nominal
        )
        Q = euler_rate_map(phi)
        chi0 = np.empty(6)
        chi0[:3] = tau0[:3] / sc.nominal.m
        chi0[3:] = np.linalg.solve(Q.T @ sc.nominal.J @ Q, tau0[3:])
        obs = ObserverState(zeta=plant.q_dot.copy(), chi=chi0)
        x0 = AugmentedState.from_parts(
            plant.q, plant.q_dot, obs.zeta, obs.chi, plant.q, plant.q_dot
        )
        res = initial_residual(x0.x, self.ctx)
        run_seed = sc.seed if seed is None else seed
        seed_seq = [run_seed, sc.wind.seed] if sc.wind is not None else [run_seed]
        rng = np.random.default_rng(seed_seq)
        cart = (sc.cart.initial_position, 0.0) if sc.cart is not None else None
        return SimState(
            plant=plant,
            obs=obs,
            res=res,
            q_d=plant.q.copy(),
            q_d_dot=plant.q_dot.copy(),
            cart=cart,
            plug_attached=sc.plug is not None,
            t=0.0,
            rng=rng,
        )

    def _pack(self, s: SimState) -> np.ndarray:
        y = np.zeros(_NY)
        y[_Q] = s.plant.q
        y[_QDOT] = s.plant.q_dot
        y[_ZETA] = s.obs.zeta
        y[_CHI] = s.obs.chi
        y[_XI] = s.res.xi
        y[_QD] = s.q_d
        y[_QDDOT] = s.q_d_dot
        if s.cart is not None:
            y[_CART_X], y[_CART_V] = s.cart
        return y

    def _unpack(
        self, y: np.ndarray, attached: bool, t: float, rng: np.random.Generator
    ) -> SimState:
        cart = (float(y[_CART_X]), float(y[_CART_V])) if self.sc.cart is not None else None
        return SimState(
            plant=PlantState(y[_Q].copy(), y[_QDOT].copy()),
            obs=ObserverState(y[_ZETA].copy(), y[_CHI].copy()),
            res=ResidualState(y[_XI].copy()),
            q_d=y[_QD].copy(),
            q_d_dot=y[_QDDOT].copy(),
            cart=cart,
            plug_attached=attached,
            t=t,
            rng=rng,
        )

    @staticmethod
    def _x36(y: np.ndarray) -> np.ndarray:
        return np.concatenate([y[0:24], y[30:42]])

    # ------------------------------------------------------------------
    # per-step command computation (zero-order hold within the step)

    def _commands(self, y: np.ndarray, t: float, attached: bool) -> dict:
        sc, ctx = self.sc, self.ctx
        q_t = sc.target_at(t)

        if sc.controller is ControllerVariant.DIRECT_CLAMP:
            # No desired trajectory: the control error is taken against the
            # raw target with zero desired velocity.
            y[_QD] = q_t
            y[_QDDOT] = 0.0

        x = self._x36(y)
        phi = y[3:6]
        q_dot = y[_QDOT]

        ja = ctx.ja(phi)
        v = (
            ctx.kd * (y[_QDDOT] - q_dot)
            + ctx.kp * (y[_QD] - y[_Q])
            + ctx.zeta_rate * (y[_ZETA] - q_dot)
            + y[_CHI]
        )
        T_raw = ja @ v

        q_dd_d = np.zeros(6)
        qp_status = _QP_OFF
        if sc.controller is ControllerVariant.SAFETY_FILTER:
            res = ResidualState(y[_XI])
            q_dd_d, sol = filter_step(
                x, res, q_t, ctx, sc.target_gen, warm_start=self._last_active
            )
            self._last_active = sol.active_set
            qp_status = _QP_OPTIMAL if sol.status == "optimal" else _QP_RELAXED
        elif sc.controller is ControllerVariant.NO_FILTER:
            q_dd_d = target_acceleration(q_t, y[_QD], y[_QDDOT], sc.target_gen)

        T_real = np.clip(T_raw, sc.barrier.t_min, sc.barrier.t_max)

        # Commanded wrench: the model's feedforward terms inside the control
        # law cancel against the ones inside the disturbance estimate, so
        # tau reduces to M_hat(phi) v exactly.
        Q = euler_rate_map(phi)
        m_hat_rot = Q.T @ (sc.nominal.J @ Q)
        cor_grav = coriolis_vector(phi, q_dot[3:], sc.nominal) + self.g_nominal
        tau_cmd = np.empty(6)
        tau_cmd[:3] = sc.nominal.m * v[:3]
        tau_cmd[3:] = m_hat_rot @ v[3:]

        w = self.ctx.zeta_rate * (y[_ZETA] - q_dot) + y[_CHI]
        d_hat = np.empty(6)
        d_hat[:3] = -sc.nominal.m * w[:3]
        d_hat[3:] = -(m_hat_rot @ w[3:])
        d_hat += cor_grav

        return {
            "q_t": q_t,
            "q_dd_d": q_dd_d,
            "T_raw": T_raw,
            "T_real": T_real,
            "qp_status": qp_status,
            "d_hat": d_hat,
            "tau_cmd": tau_cmd,
            "h": barrier_values(T_raw, sc.barrier),
        }

    # ------------------------------------------------------------------
    # environment

    def _contact_terms(
        self, y: np.ndarray, R: np.ndarray, Q: np.ndarray, attached: bool
    ) -> tuple[np.ndarray, float]:
        """Contact wrench on the vehicle and the cart contact force."""
        sc = self.sc
        q, q_dot = y[_Q], y[_QDOT]
        wrench = np.zeros(6)
        cart_force = 0.0
        if sc.wall is not None:
            force = env._wall_force(q, q_dot, R, Q, sc.wall, sc.ee)
            if force is not None:
                wrench += env._tip_wrench(force, R, Q, sc.ee)
        if sc.plug is not None and attached:
            force, still = env._plug_force(q, q_dot, R, Q, sc.plug, sc.ee)
            if still:
                wrench += env._tip_wrench(force, R, Q, sc.ee)
        if sc.cart is not None:
            cart_force = env._cart_force(
                q, q_dot, R, Q, float(y[_CART_X]), float(y[_CART_V]), sc.cart, sc.ee
            )
            if cart_force > 0.0:
                wrench += env._tip_wrench(
                    np.array([-cart_force, 0.0, 0.0]), R, Q, sc.ee
                )
        return wrench, cart_force

    def _contact_wrench(self, y: np.ndarray, attached: bool) -> np.ndarray:
        """Sum of wall, plug, and cart wrenches at the given state."""
        phi = y[3:6]
        R = rotation_matrix(phi)
        Q = euler_rate_map(phi)
        return self._contact_terms(y, R, Q, attached)[0]

    # ------------------------------------------------------------------
    # stage derivative (the continuous dynamics under held commands)

    def _derivative(
        self,
        t: float,
        y: np.ndarray,
        cmd: dict,
        attached: bool,
        wind_noise: Optional[np.ndarray],
    ) -> np.ndarray:
        sc, ctx = self.sc, self.ctx
        phi = y[3:6]
        if abs(phi[1]) > _PITCH_LIMIT:
            raise SingularAttitude(f"pitch {phi[1]:.6f} rad at t={t:.4f}")
        q_dot = y[_QDOT]
        phi_dot = q_dot[3:]

        R = rotation_matrix(phi)
        Q = euler_rate_map(phi)
        Q_inv = euler_rate_map_inv(phi)
        Q_dot = euler_rate_map_dot(phi, phi_dot)

        # Realized thrusts are held; the wrench follows the stage attitude.
        bw_plant = self._bw_plant
        tau_applied = np.empty(6)
        tau_applied[:3] = R @ bw_plant[:3]
        tau_applied[3:] = Q.T @ bw_plant[3:]

        tau_ext, cart_force = self._contact_terms(y, R, Q, attached)
        if sc.wind is not None:
            gust = sc.wind.mean_force + sc.wind.gust_amplitude * np.sin(
                2.0 * np.pi * sc.wind.gust_frequency * t
            )
            tau_ext[:3] += gust
            if wind_noise is not None:
                tau_ext[:3] += wind_noise

        dy = np.zeros(_NY)
        dy[_Q] = q_dot

        rhs = tau_applied + tau_ext - self.g_plant
        rhs[3:] -= coriolis_rot(Q, Q_dot, phi_dot, sc.plant.J)
        dy[6:9] = rhs[:3] / sc.plant.m
        # (Q^T J Q)^-1 = Q^-1 J^-1 Q^-T with the analytic Q inverse.
        dy[9:12] = Q_inv @ (self.j_plant_inv @ (Q_inv.T @ rhs[3:]))

        # Observer filters see the wrench implied by the held thrusts under
        # the nominal model.
        bw_nom = self._bw_nominal
        m_inv_tau = np.empty(6)
        m_inv_tau[:3] = (R @ bw_nom[:3]) / sc.nominal.m
        # (Q^T J Q)^-1 Q^T w = Q^-1 J^-1 w
        m_inv_tau[3:] = Q_inv @ (self.j_nominal_inv @ bw_nom[3:])
        dy[_ZETA] = -ctx.zeta_rate * (y[_ZETA] - q_dot)
        dy[_CHI] = -ctx.chi_rate * (y[_CHI] - m_inv_tau)

        if sc.controller is ControllerVariant.SAFETY_FILTER:
            dy[_XI] = residual_state_rate(
                self._x36(y), ResidualState(y[_XI]), cmd["q_dd_d"], ctx
            )

        dy[_QD] = y[_QDDOT]
        dy[_QDDOT] = cmd["q_dd_d"]

        if sc.cart is not None:
            dy[_CART_X] = y[_CART_V]
            dy[_CART_V] = env.cart_accel(cart_force, float(y[_CART_V]), sc.cart)
        return dy

    # ------------------------------------------------------------------
    # stepping

    def _latch_breakaway(self, y: np.ndarray, attached: bool) -> bool:
        sc = self.sc
        if sc.plug is None or not attached:
            return False
        plant_state = PlantState(y[_Q].copy(), y[_QDOT].copy())
        _, attached = env.plug_wrench(plant_state, sc.plug, sc.ee, True)
        return attached

    def step_flat(
        self,
        y: np.ndarray,
        t: float,
        attached: bool,
        rng: np.random.Generator,
        dt: float,
    ) -> tuple[np.ndarray, bool, dict]:
        """Advance one control step; returns (y', attached', step record)."""
        attached = self._latch_breakaway(y, attached)
        cmd = self._commands(y, t, attached)
        self._bw_plant = self.xi_plant @ cmd["T_real"]
        self._bw_nominal = self.xi_nominal @ cmd["T_real"]

        wind_noise = None
        if self.sc.wind is not None and self.sc.wind.noise_std > 0.0:
            wind_noise = rng.normal(0.0, self.sc.wind.noise_std, size=3)

        cmd["f_contact"] = self._contact_wrench(y, attached)[:3].copy()

        def deriv(ts, ys):
            return self._derivative(ts, ys, cmd, attached, wind_noise)

        k1 = deriv(t, y)
        k2 = deriv(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = deriv(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = deriv(t + dt, y + dt * k3)
        y_next = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        cmd["q_dd"] = k1[_QDOT].copy()

        if not np.all(np.isfinite(y_next)) or np.any(
            np.abs(y_next) > _DIVERGENCE_LIMIT
        ):
            raise NumericalDivergence(f"state magnitude exceeded limit at t={t:.4f}")
        if abs(y_next[4]) > _PITCH_LIMIT:
            raise SingularAttitude(
                f"pitch {y_next[4]:.6f} rad at t={t + dt:.4f}"
            )
        return y_next, attached, cmd

    def step(self, state: SimState, dt: Optional[float] = None) -> SimState:
        """Advance a SimState by one control step (public, copying API)."""
        dt = self.sc.dt if dt is None else dt
        y = self._pack(state)
        y_next, attached, _ = self.step_flat(
            y, state.t, state.plug_attached, state.rng, dt
        )
        return self._unpack(y_next, attached, state.t + dt, state.rng)

    # ------------------------------------------------------------------
    # full run

    def run(
        self,
        seed: Optional[int] = None,
        on_step: Optional[Callable[[int, dict], None]] = None,
    ) -> SimLog:
        sc = self.sc
        n_steps = int(round(sc.duration / sc.dt))
        n_rows = n_steps + 1
        self._last_active = None

        log = SimLog(
            scenario_name=sc.name,
            controller=sc.controller.value,
            dt=sc.dt,
            seed=sc.seed if seed is None else seed,
            t_min=sc.barrier.t_min,
            t_max=sc.barrier.t_max,
            t=np.zeros(n_rows),
            q=np.zeros((n_rows, 6)),
            q_dot=np.zeros((n_rows, 6)),
            q_d=np.zeros((n_rows, 6)),
            q_t=np.zeros((n_rows, 6)),
            T=np.zeros((n_rows, 6)),
            T_raw=np.zeros((n_rows, 6)),
            d_hat=np.zeros((n_rows, 6)),
            h=np.zeros((n_rows, 6)),
            qp_status=np.zeros(n_rows, dtype=np.int8),
            f_contact=np.zeros((n_rows, 3)),
            cart_x=np.full(n_rows, np.nan),
            cart_v=np.full(n_rows, np.nan),
        )

        state0 = self.initial_state(seed=seed)
        y = self._pack(state0)
        attached = state0.plug_attached
        rng = state0.rng
        t = 0.0
        rows = 0
        try:
            for i in range(n_rows):
                t = i * sc.dt
                if i < n_steps:
                    y_next, attached_next, cmd = self.step_flat(
                        y, t, attached, rng, sc.dt
                    )
                else:
                    # Final row: record state and the commands it implies.
                    attached = self._latch_breakaway(y, attached)
                    cmd = self._commands(y, t, attached)
                    cmd["f_contact"] = self._contact_wrench(y, attached)[:3].copy()
                    y_next, attached_next = y, attached
                self._log_row(log, i, t, y, cmd)
                rows = i + 1
                if on_step is not None:
                    on_step(i, {"t": t, "y": y.copy(), **cmd})
                y, attached = y_next, attached_next
        except (SingularAttitude, NumericalDivergence, env.ContactForceExceeded) as exc:
            log.aborted = True
            log.abort_reason = f"{type(exc).__name__}: {exc}"
            _truncate_log(log, rows)
        return log

    def _log_row(self, log: SimLog, i: int, t: float, y: np.ndarray, cmd: dict):
        log.t[i] = t
        log.q[i] = y[_Q]
        log.q_dot[i] = y[_QDOT]
        log.q_d[i] = y[_QD]
        log.q_t[i] = cmd["q_t"]
        log.T[i] = cmd["T_real"]
        log.T_raw[i] = cmd["T_raw"]
        log.d_hat[i] = cmd["d_hat"]
        log.h[i] = cmd["h"]
        log.qp_status[i] = cmd["qp_status"]
        log.f_contact[i] = cmd["f_contact"]
        if self.sc.cart is not None:
            log.cart_x[i] = y[_CART_X]
            log.cart_v[i] = y[_CART_V]


def _truncate_log(log: SimLog, rows: int) -> None:
    for name in (
        "t",
        "q",
        "q_dot",
        "q_d",
        "q_t",
        "T",
        "T_raw",
        "d_hat",
        "h",
        "qp_status",
        "f_contact",
        "cart_x",
        "cart_v",
    ):
        setattr(log, name, getattr(log, name)[:rows])


def step(state: SimState, scenario: Scenario, dt: float) -> SimState:
    """One control step of the closed loop (convenience wrapper)."""
    return Engine(scenario).step(state, dt)


def run(
    scenario: Scenario,
    seed: Optional[int] = None,
    on_step: Optional[Callable[[int, dict], None]] = None,
) -> SimLog:
    """Simulate a scenario start to finish; deterministic for a given seed."""
    return Engine(scenario).run(seed=seed, on_step=on_step)


def metrics(log: SimLog, settle_tol: float = 0.05, hold_time: float = 1.0) -> MetricsReport:
    """Summary statistics of a run.

    ``resettling_time`` is measured from the breakaway instant (contact
    force permanently dropping to zero) to the first time the position
    error stays below ``settle_tol`` for ``hold_time`` seconds.
    """
    if log.n_rows == 0:
        raise ValueError("empty log")
    err_d = log.q - log.q_d
    err_t = log.q - log.q_t
    rms = np.sqrt(np.mean(err_d**2, axis=0))
    overshoot = np.max(np.abs(err_t), axis=0)
    tail = max(1, log.n_rows // 10)
    steady = np.mean(np.abs(err_d[-tail:]), axis=0)

    violations = int(
        np.sum(np.any((log.T_raw < log.t_min) | (log.T_raw > log.t_max), axis=1))
    )
    relaxed = int(np.sum(log.qp_status == _QP_RELAXED))

    breakaway = None
    resettle = None
    contact_mag = np.linalg.norm(log.f_contact, axis=1)
    active = contact_mag > 1e-9
    if np.any(active) and not active[-1]:
        last_active = int(np.flatnonzero(active)[-1])
        breakaway = float(log.t[last_active + 1])
        pos_err = np.linalg.norm(log.q[:, :3] - log.q_t[:, :3], axis=1)
        hold_steps = max(1, int(round(hold_time / log.dt)))
        start = last_active + 1
        inside = pos_err[start:] < settle_tol
        for j in range(inside.size - hold_steps + 1):
            if np.all(inside[j : j + hold_steps]):
                resettle = float(log.t[start + j] - breakaway)
                break

    return MetricsReport(
        rms_tracking_error=rms,
        max_overshoot=overshoot,
        steady_state_error=steady,
        thrust_min=float(np.min(log.T)),
        thrust_max=float(np.max(log.T)),
        thrust_violation_steps=violations,
        relaxed_qp_steps=relaxed,
        breakaway_time=breakaway,
        resettling_time=resettle,
        aborted=log.aborted,
    )
