"""Interaction-wrench generators for the scenario environments.

The controller stack is deliberately blind to these wrenches; they enter
the plant as external disturbances. Contacts use smooth unilateral
spring-damper penalties so the fixed-step integrator sees continuous
stage dynamics. All forces act at the arm's tool tip, a fixed body-frame
offset from the vehicle origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import PlantState, cross3, euler_rate_map, rotation_matrix
from .errors import ContactForceExceeded

_STICTION_SPEED = 1e-4  # below this cart speed the Coulomb term is zeroed


@dataclass(frozen=True, eq=False)
class EndEffectorConfig:
    """Body-frame offset from the vehicle origin to the tool tip (m)."""

    offset_body: np.ndarray = field(default_factory=lambda: np.array([0.35, 0.0, 0.0]))

    def __post_init__(self):
        object.__setattr__(
            self, "offset_body", np.asarray(self.offset_body, dtype=float).reshape(3)
        )
        if not np.all(np.isfinite(self.offset_body)):
            raise ValueError("offset_body must be finite")


@dataclass(frozen=True, eq=False)
class WallConfig:
    """Unilateral spring-damper plane; the normal points into the wall."""

    plane_point: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 1.0]))
    normal: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    stiffness: float = 500.0
    damping: float = 50.0
    force_cap: float = 200.0

    def __post_init__(self):
        object.__setattr__(
            self, "plane_point", np.asarray(self.plane_point, dtype=float).reshape(3)
        )
        object.__setattr__(
            self, "normal", np.asarray(self.normal, dtype=float).reshape(3)
        )
        if abs(np.linalg.norm(self.normal) - 1.0) > 1e-9:
            raise ValueError("normal must be a unit vector")
        if self.stiffness < 0 or self.damping < 0:
            raise ValueError("stiffness and damping must be nonnegative")


@dataclass(frozen=True, eq=False)
class PlugConfig:
    """Bilateral spring-damper to an anchor with a latching breakaway."""

    anchor: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 1.0]))
    stiffness: float = 800.0
    damping: float = 40.0
    break_force: float = 12.0
    force_cap: float = 200.0

    def __post_init__(self):
        object.__setattr__(
            self, "anchor", np.asarray(self.anchor, dtype=float).reshape(3)
        )
        if self.stiffness < 0 or self.damping < 0:
            raise ValueError("stiffness and damping must be nonnegative")
        if not self.break_force > 0:
            raise ValueError("break_force must be positive (inf for firm)")


@dataclass(frozen=True, eq=False)
class CartConfig:
    """Movable 1-D cart pushed along the world x axis."""

    mass: float = 2.0
    viscous_friction: float = 4.0
    coulomb_friction: float = 3.0
    contact_stiffness: float = 500.0
    contact_damping: float = 50.0
    initial_position: float = 1.0
    goal_line: float = 1.5
    force_cap: float = 200.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("cart mass must be positive")
        if self.viscous_friction < 0 or self.coulomb_friction < 0:
            raise ValueError("friction coefficients must be nonnegative")
        if self.contact_stiffness < 0 or self.contact_damping < 0:
            raise ValueError("contact stiffness/damping must be nonnegative")


@dataclass(frozen=True, eq=False)
class WindConfig:
    """Fan model: constant mean, sinusoidal gust, white noise per axis."""

    mean_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gust_amplitude: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gust_frequency: float = 0.0
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "mean_force", np.asarray(self.mean_force, dtype=float).reshape(3)
        )
        object.__setattr__(
            self,
            "gust_amplitude",
            np.asarray(self.gust_amplitude, dtype=float).reshape(3),
        )
        if self.gust_frequency < 0:
            raise ValueError("gust_frequency must be nonnegative")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")


def _tip_kinematics(
    q: np.ndarray,
    q_dot: np.ndarray,
    R: np.ndarray,
    Q: np.ndarray,
    ee: EndEffectorConfig,
) -> tuple[np.ndarray, np.ndarray]:
    omega = Q @ q_dot[3:]
    p_e = q[:3] + R @ ee.offset_body
    v_e = q_dot[:3] + R @ cross3(omega, ee.offset_body)
    return p_e, v_e


def _tip_wrench(
    force_world: np.ndarray,
    R: np.ndarray,
    Q: np.ndarray,
    ee: EndEffectorConfig,
) -> np.ndarray:
    arm_world = R @ ee.offset_body
    moment_body = R.T @ cross3(arm_world, force_world)
    out = np.empty(6)
    out[:3] = force_world
    out[3:] = Q.T @ moment_body
    return out


def tool_tip(state: PlantState, ee: EndEffectorConfig) -> tuple[np.ndarray, np.ndarray]:
    """World-frame tool-tip position and velocity."""
    R = rotation_matrix(state.phi)
    Q = euler_rate_map(state.phi)
    return _tip_kinematics(state.q, state.q_dot, R, Q, ee)


def tip_force_to_wrench(
    force_world: np.ndarray, state: PlantState, ee: EndEffectorConfig
) -> np.ndarray:
    """Generalized wrench from a world-frame force applied at the tool tip.

    The rotational rows use the same Euler-angle coordinates as the mass
    matrix: Q^T times the body-frame moment of the force about the origin.
    """
    R = rotation_matrix(state.phi)
    Q = euler_rate_map(state.phi)
    return _tip_wrench(np.asarray(force_world, dtype=float), R, Q, ee)


def _check_cap(force: np.ndarray, cap: float, what: str) -> None:
    mag = float(np.linalg.norm(force))
    if mag > cap:
        raise ContactForceExceeded(f"{what} force {mag:.1f} N exceeds cap {cap:.1f} N")


def _wall_force(
    q, q_dot, R, Q, wall: WallConfig, ee: EndEffectorConfig
) -> Optional[np.ndarray]:
    """World-frame wall reaction force at the tip, or None without contact."""
    p_e, v_e = _tip_kinematics(q, q_dot, R, Q, ee)
    depth = float(wall.normal @ (p_e - wall.plane_point))
    if depth <= 0.0:
        return None
    depth_rate = float(wall.normal @ v_e)
    magnitude = max(wall.stiffness * depth + wall.damping * depth_rate, 0.0)
    force = -magnitude * wall.normal
    _check_cap(force, wall.force_cap, "wall contact")
    return force


def _plug_force(
    q, q_dot, R, Q, plug: PlugConfig, ee: EndEffectorConfig
) -> tuple[Optional[np.ndarray], bool]:
    """(force, still_attached) for an attached plug."""
    p_e, v_e = _tip_kinematics(q, q_dot, R, Q, ee)
    stretch = p_e - plug.anchor
    tension = plug.stiffness * float(np.linalg.norm(stretch))
    if tension > plug.break_force:
        return None, False
    force = -plug.stiffness * stretch - plug.damping * v_e
    _check_cap(force, plug.force_cap, "plug")
    return force, True


def wall_wrench(
    state: PlantState, wall: WallConfig, ee: EndEffectorConfig
) -> np.ndarray:
    """Reaction wrench from pressing the tool tip into the wall plane.

    Penetration is measured along the wall normal; the contact never pulls
    (the force is clipped at zero when the tip separates faster than the
    spring pushes).
    """
    R = rotation_matrix(state.phi)
    Q = euler_rate_map(state.phi)
    force = _wall_force(state.q, state.q_dot, R, Q, wall, ee)
    if force is None:
        return np.zeros(6)
    return _tip_wrench(force, R, Q, ee)


def plug_wrench(
    state: PlantState,
    plug: PlugConfig,
    ee: EndEffectorConfig,
    attached: bool,
) -> tuple[np.ndarray, bool]:
    """Wrench from a plug held by the tool, with latching breakaway.

    Returns the wrench and the updated attachment flag. Once the spring
    tension exceeds ``break_force`` the plug releases and stays released.
    """
    if not attached:
        return np.zeros(6), False
    R = rotation_matrix(state.phi)
    Q = euler_rate_map(state.phi)
    force, still = _plug_force(state.q, state.q_dot, R, Q, plug, ee)
    if not still:
        return np.zeros(6), False
    return _tip_wrench(force, R, Q, ee), True


def _cart_force(
    q, q_dot, R, Q, cart_x: float, cart_v: float, cart: CartConfig, ee
) -> float:
    p_e, v_e = _tip_kinematics(q, q_dot, R, Q, ee)
    depth = float(p_e[0]) - cart_x
    if depth <= 0.0:
        return 0.0
    depth_rate = float(v_e[0]) - cart_v
    f = max(cart.contact_stiffness * depth + cart.contact_damping * depth_rate, 0.0)
    if f > cart.force_cap:
        raise ContactForceExceeded(
            f"cart contact force {f:.1f} N exceeds cap {cart.force_cap:.1f} N"
        )
    return f


def cart_contact_force(
    state: PlantState,
    cart_x: float,
    cart_v: float,
    cart: CartConfig,
    ee: EndEffectorConfig,
) -> float:
    """Unilateral contact force (>= 0, +x on the cart) at the cart face."""
    R = rotation_matrix(state.phi)
    Q = euler_rate_map(state.phi)
    return _cart_force(state.q, state.q_dot, R, Q, cart_x, cart_v, cart, ee)


def cart_accel(contact_force: float, cart_v: float, cart: CartConfig) -> float:
    """Cart acceleration under contact, viscous, and Coulomb friction."""
    coulomb = cart.coulomb_friction if abs(cart_v) >= _STICTION_SPEED else 0.0
    return (
        contact_force - cart.viscous_friction * cart_v - coulomb * math.copysign(1.0, cart_v)
    ) / cart.mass


def cart_step(
    cart_state: tuple[float, float],
    state: PlantState,
    cart: CartConfig,
    ee: EndEffectorConfig,
    dt: float,
) -> tuple[tuple[float, float], np.ndarray]:
    """Advance the cart by ``dt`` and return the reaction wrench on the vehicle.

    The contact force is evaluated once at the step start and held, so the
    impulse given to the cart is exactly the negative of the impulse the
    vehicle receives. The vehicle state is treated as frozen over the step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    x, v = cart_state
    f_c = cart_contact_force(state, x, v, cart, ee)

    def rates(xv):
        return np.array([xv[1], cart_accel(f_c, xv[1], cart)])

    y = np.array([x, v])
    k1 = rates(y)
    k2 = rates(y + 0.5 * dt * k1)
    k3 = rates(y + 0.5 * dt * k2)
    k4 = rates(y + dt * k3)
    y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    wrench = (
        tip_force_to_wrench(np.array([-f_c, 0.0, 0.0]), state, ee)
        if f_c > 0.0
        else np.zeros(6)
    )
    return (float(y[0]), float(y[1])), wrench


def wind_wrench(
    t: float, wind: WindConfig, rng: np.random.Generator
) -> np.ndarray:
    """Translational wind wrench at time ``t``; draws one noise sample."""
    force = wind.mean_force + wind.gust_amplitude * np.sin(
        2.0 * np.pi * wind.gust_frequency * t
    )
    if wind.noise_std > 0.0:
        force = force + rng.normal(0.0, wind.noise_std, size=3)
    out = np.zeros(6)
    out[:3] = force
    return out
