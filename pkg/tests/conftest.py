import sys

import numpy as np
import pytest
from hypothesis import settings

from bethegeom.spinchain import ChainSpec

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


def draw_complex(rng, lo=0.5, hi=2.0):
    return complex(rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform()))


def draw_chain(rng, n):
    """Generic chain: a on the annulus with spread angles, |hbar| in [0.3, 0.7]."""
    ang = 2 * np.pi * (np.arange(n) + 0.8 * rng.uniform(size=n)) / n
    a = tuple(rng.uniform(0.5, 2.0, n) * np.exp(1j * ang))
    return ChainSpec(a, draw_complex(rng, 0.3, 0.7), draw_complex(rng, 0.5, 0.9))


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
