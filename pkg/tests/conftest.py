import numpy as np
import pytest

from hallmhd import spectral as sp


@pytest.fixture
def g16():
    return sp.get_grid(16)


@pytest.fixture
def g32():
    return sp.get_grid(32)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def field(grid, *components):
    """Spectral coefficients of an analytic field given as callables of (x, y, z)."""
    x, y, z = grid.x
    vals = [np.broadcast_to(c(x, y, z), grid.shape) for c in components]
    data = vals[0] if len(vals) == 1 else np.stack(vals)
    return sp.forward(np.ascontiguousarray(data, dtype=float), grid)


def zero(x, y, z):
    return 0.0 * x


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
