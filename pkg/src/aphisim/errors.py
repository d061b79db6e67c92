"""Exception types shared across the package."""


class SingularAttitude(ValueError):
    """Pitch is too close to +/- pi/2 for the Euler-angle kinematics."""


class NonInvertibleAllocation(ValueError):
    """Thrust allocation matrix is numerically singular."""


class NumericalDivergence(RuntimeError):
    """A simulated state magnitude exceeded the divergence guard."""


class ContactForceExceeded(RuntimeError):
    """An environment wrench exceeded its configured safety cap."""
