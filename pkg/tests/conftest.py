import numpy as np
import pytest

from swlqr.cli import bundled_fixture_path
from swlqr.io import load_system
from swlqr.model import ModeData, SwitchedSystem

# Three-significant-digit roundings of the benchmark fixture matrices,
# the form the values are usually quoted in. Rounding costs the terminal
# matrix its feasibility margin (~1e-2 short), so it doubles as a
# negative control; the fixture itself stores the unrounded values.
ROUNDED_P_UPPER = np.array([[6.91, 1.32], [1.32, 1.92]])
ROUNDED_P_LOWER = np.array([[5.05, 1.40], [1.40, 1.5]])


@pytest.fixture(scope="session")
def benchmark():
    """(system, p_lower, p_upper) of the bundled two-mode benchmark."""
    return load_system(bundled_fixture_path())


@pytest.fixture(scope="session")
def bench_system(benchmark):
    return benchmark[0]


@pytest.fixture(scope="session")
def bench_p_lower(benchmark):
    return benchmark[1]


@pytest.fixture(scope="session")
def bench_p_upper(benchmark):
    return benchmark[2]


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def make_scalar_system(a, b, q=1.0, r=1.0):
    return SwitchedSystem((ModeData(A=[[a]], B=[[b]], Q=[[q]], R=[[r]]),))


def random_psd(rng, n, scale=1.0):
    G = rng.standard_normal((n, n))
    return scale * (G @ G.T) / n


def half_circle(n):
    ts = [j * np.pi / (n + 1) for j in range(1, n + 1)]
    return [np.array([np.cos(t), np.sin(t)]) for t in ts]
