"""Safety-filtered control and simulation of a fully actuated aerial manipulator.

Modules:
    dynamics       rigid-body model, Euler-angle kinematics, thrust allocation
    observer       lumped-disturbance observer
    controller     tracking control law and comparison baselines
    safety_filter  thrust-limit barriers, residual estimator, safety QP
    qp_solver      exact active-set solver for the small projection QPs
    environment    wall/plug/cart/wind interaction wrenches
    sim_engine     deterministic fixed-step closed-loop simulator and metrics
    scenario_io    TOML scenario files and built-in presets
    cli            command-line front end
"""

__version__ = "0.1.0"

from .scenario_io import load_scenario  # noqa: E402
from .sim_engine import Engine, Scenario, SimLog, metrics, run  # noqa: E402

__all__ = [
    "Engine",
    "Scenario",
    "SimLog",
    "load_scenario",
    "metrics",
    "run",
]
