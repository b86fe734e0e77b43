import math

import numpy as np
import pytest

from virtsrc.geometry import build_mesh, circle, flower
from virtsrc.operator import VirtualSourceOperator

K0 = 4 * math.pi
LAMBDA0 = 2 * math.pi / K0


@pytest.fixture(scope="session")
def flower_op():
    """Flower curve, k = 4pi, 12 elements per wavelength, h = lambda/12."""
    return VirtualSourceOperator(build_mesh(flower(), K0, 12, LAMBDA0 / 12))


@pytest.fixture(scope="session")
def circle_op():
    return VirtualSourceOperator(build_mesh(circle(1.0), K0, 12, LAMBDA0 / 12))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
