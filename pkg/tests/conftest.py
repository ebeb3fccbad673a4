import numpy as np
import pytest

from armscan.kinematics import RobotGeometry


@pytest.fixture
def geom():
    return RobotGeometry()


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def random_joint_tuples(geom, n, rng, margin=1e-6):
    """Uniform in-limit joint samples, one row per tuple."""
    lows = np.array([lo + margin for lo, hi in geom.joint_limits])
    highs = np.array([hi - margin for lo, hi in geom.joint_limits])
    return rng.uniform(lows, highs, size=(n, 6))
