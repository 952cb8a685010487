import math

import pytest

from engine.coin import BlochAngles, CoinState, from_bloch, mixture
from engine.models import DesignSpec
from engine.parrondo import build_family, design_daisy_chain
from engine.steps import general_step


@pytest.fixture
def two_steps():
    """T1 = T(1,-1;f,0), T2 = T(1,-1;d,f)."""
    return [general_step(1, -1, "f", "0"), general_step(1, -1, "d", "f")]


@pytest.fixture
def two_step_family(two_steps):
    return build_family(two_steps, 3)


@pytest.fixture
def three_steps():
    return [general_step(1, -2, "h", "0"), general_step(1, -1, "f", "d"), general_step(2, -1, "f", "d")]


@pytest.fixture
def three_step_family(three_steps):
    return build_family(three_steps, 2)


@pytest.fixture
def psi1():
    return from_bloch(BlochAngles(math.pi / 2, 13 * math.pi / 16))


@pytest.fixture
def psi2():
    return from_bloch(BlochAngles(math.pi / 2, 7 * math.pi / 8))


@pytest.fixture
def rho12(psi1, psi2):
    return mixture([(0.5, psi1), (0.5, psi2)])


@pytest.fixture
def phi_home():
    norm = math.sqrt(0.741 ** 2 + 0.257 ** 2 + 0.62 ** 2)
    return CoinState(0.741 / norm, complex(-0.257, -0.62) / norm)


@pytest.fixture
def designed_two_steps():
    return design_daisy_chain(DesignSpec(m=2, target="h", strides=[(-1, -1), (3, -4)]))


@pytest.fixture
def designed_four_steps():
    return design_daisy_chain(
        DesignSpec(m=4, target="0", intermediates=["h", "d"], strides=[(-1, -1), (-1, -1), (-1, -1), (4, -5)])
    )
