import numpy as np
import pytest

from aphisim.controller import ControllerGains
from aphisim.dynamics import default_plant_params, nominal_params
from aphisim.observer import ObserverGains
from aphisim.safety_filter import BarrierConfig, FilterContext, TargetGenConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def nominal():
    return nominal_params()


@pytest.fixture
def plant():
    return default_plant_params()


@pytest.fixture
def ctrl_gains():
    return ControllerGains()


@pytest.fixture
def obs_gains():
    return ObserverGains()


@pytest.fixture
def barrier():
    return BarrierConfig()


@pytest.fixture
def target_gen():
    return TargetGenConfig()


@pytest.fixture
def ctx(nominal, ctrl_gains, obs_gains, barrier):
    return FilterContext(nominal, ctrl_gains, obs_gains, barrier)


def random_state36(rng, scale=0.5, pitch_cap=0.4):
    """Random augmented state with pitch kept away from the singularity."""
    x = rng.uniform(-scale, scale, 36)
    x[4] = np.clip(x[4], -pitch_cap, pitch_cap)
    return x
