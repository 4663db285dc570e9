import numpy as np
import pytest

from riot_energy_lab import gen_dataset, shipped_calibration


@pytest.fixture(scope="session")
def calibration():
    return shipped_calibration()


@pytest.fixture(scope="session")
def small_dataset(calibration):
    return gen_dataset(300, seed=11, calibration=calibration)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
