import numpy as np
import pytest

from so3fft import build_delta_table


@pytest.fixture(scope="session")
def delta8():
    return build_delta_table(8)


@pytest.fixture(scope="session")
def delta16():
    return build_delta_table(16)


@pytest.fixture(scope="session")
def delta32():
    return build_delta_table(32)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240901)
