import numpy as np
import pytest
from hypothesis import strategies as st

from qligand import kernels
from qligand.grid import GridSpec, OccupancyGrid


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    previous = kernels.backend_name()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_grid(rng, bits=(3, 3, 3), max_cells=16, signed=True, spec=None):
    spec = spec or GridSpec(*bits)
    size = int(np.prod(spec.shape))
    n = int(rng.integers(1, min(max_cells, size) + 1))
    flat = rng.choice(size, size=n, replace=False)
    cells = {}
    for f in flat.tolist():
        coord = np.unravel_index(f, spec.shape)
        w = float(rng.integers(1, 9))
        if signed and rng.random() < 0.4:
            w = -w
        cells[tuple(int(c) for c in coord)] = w
    return OccupancyGrid(spec, cells)


@st.composite
def grids(draw, max_bits=3, max_cells=32, cubic=False):
    if cubic:
        b = draw(st.integers(1, max_bits))
        bits = (b, b, b)
    else:
        bits = tuple(draw(st.integers(0, max_bits)) for _ in range(3))
    spec = GridSpec(*bits)
    coords = st.tuples(*(st.integers(0, s - 1) for s in spec.shape))
    weights = st.integers(-8, 8).filter(bool).map(float)
    cells = draw(st.dictionaries(coords, weights, min_size=1, max_size=max_cells))
    return OccupancyGrid(spec, cells)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


def pytest_addoption(parser):
    parser.addoption("--kernel-backend", choices=sorted(kernels.BACKENDS),
                     help="simulator kernels for tests that do not parametrize over backends")


def pytest_configure(config):
    name = config.getoption("--kernel-backend")
    if name:
        kernels.set_backend(name)
