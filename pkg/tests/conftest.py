"""Shared fixtures for the test suite.

The default parameter set used across tests:
  pump 351 nm, walk-off 0.2 ps/mm over 0.5 mm  -> tau0 = 50 fs
  fiber k2 = 3.6e-26 s^2/m, 240 m go-and-return -> z = 480 m,
  tau_f = 2*k2*z/tau0 = 6.912e-10 s.
"""

import numpy as np
import pytest

from biphoton import (
    CrystalParams,
    FiberChannel,
    FrequencyGrid,
    pdc_state,
)

TAU0 = 5e-14
TAU_F = 6.912e-10


@pytest.fixture
def crystal():
    return CrystalParams(pump_wavelength=351e-9, gvm=2.0e-10, length=0.5e-3)


@pytest.fixture
def grid(crystal):
    return FrequencyGrid(n=512, omega_max=8.0 * np.pi / crystal.tau0)


@pytest.fixture
def fiber():
    return FiberChannel(k2=3.6e-26, geometric_length=240.0, passes="go_and_return")


@pytest.fixture
def state(crystal, grid):
    return pdc_state(crystal, grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20220225)
