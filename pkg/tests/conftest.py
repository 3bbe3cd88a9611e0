import json
import os

import numpy as np
import pytest

from z2graze import PRECISE, circle_system, parabola_system, thompson_hunt

HERE = os.path.dirname(os.path.abspath(__file__))

with open(os.path.join(HERE, "golden", "baselines.json"), encoding="utf-8") as _fh:
    BASELINES = json.load(_fh)

THETA = BASELINES["thompson_hunt"]["theta"]


@pytest.fixture(scope="session")
def baselines():
    return BASELINES


@pytest.fixture(scope="session")
def circle():
    return circle_system()


@pytest.fixture(scope="session")
def parabola():
    return parabola_system()


@pytest.fixture(scope="session")
def oscillator():
    """The oscillator family at a = -1 on its grazing locus."""
    return thompson_hunt(-1.0, THETA)


@pytest.fixture(scope="session")
def oscillator_unfolding(oscillator):
    from z2graze.atlas import Unfolding
    return Unfolding(oscillator, PRECISE)


@pytest.fixture(scope="session")
def circle_unfolding(circle):
    from z2graze.atlas import Unfolding
    return Unfolding(circle, PRECISE)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
