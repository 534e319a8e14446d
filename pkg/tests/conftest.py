import numpy as np
import pytest

from lie_dmoc import InertiaModel

# operator inertia matrix used by the reference maneuvers (kg m^2)
OPERATOR_INERTIA = [[13.25, -7.80, -11.40],
                    [-7.80, 16.25, 4.71],
                    [-11.40, 4.71, 18.37]]


@pytest.fixture(scope="session")
def inertia():
    return InertiaModel.from_operator_matrix(OPERATOR_INERTIA)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_rotation(rng, max_angle=np.pi - 0.2):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    from lie_dmoc import exp_so3
    return exp_so3(rng.uniform(0.0, max_angle) * axis)
