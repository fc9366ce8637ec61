import numpy as np
import pytest

from cvsteer import LocalSymplectic


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeeze(s):
    return np.diag([np.exp(s), np.exp(-s)])


def random_single_mode_symplectic(rng, max_squeeze=1.0):
    """Rotation * squeeze * rotation: always symplectic, no chart issues."""
    return (
        rotation(rng.uniform(0, 2 * np.pi))
        @ squeeze(rng.uniform(-max_squeeze, max_squeeze))
        @ rotation(rng.uniform(0, 2 * np.pi))
    )


def random_local_symplectic(rng, max_squeeze=1.0):
    return LocalSymplectic(
        random_single_mode_symplectic(rng, max_squeeze),
        random_single_mode_symplectic(rng, max_squeeze),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
