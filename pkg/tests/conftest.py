import pytest
from hypothesis import settings

from lventire.front import solve_system_front
from lventire.model import ModelParams
from lventire.odefree import monotone_orbit_theta, solve_diffusion_free
from lventire.spectral import WaveParams
from lventire.supersub import build_front_family

# Numerical solves have uneven wall time; only the example count is bounded.
settings.register_profile("lventire", deadline=None)
settings.load_profile("lventire")

# One line per acceptance criterion, filled by test_acceptance.py.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def sym_model():
    return ModelParams(0.5, 0.5, 1.0, 1.0)


@pytest.fixture(scope="session")
def asym_model():
    return ModelParams(0.3, 0.6, 1.5, 0.8)


@pytest.fixture(scope="session")
def front_22(sym_model):
    return solve_system_front(WaveParams(sym_model, 2.2))


@pytest.fixture(scope="session")
def front_30(sym_model):
    return solve_system_front(WaveParams(sym_model, 3.0))


@pytest.fixture(scope="session")
def front_asym(asym_model):
    return solve_system_front(WaveParams(asym_model, 2.6))


@pytest.fixture(scope="session")
def orbit_sym(sym_model):
    return solve_diffusion_free(sym_model, *monotone_orbit_theta(sym_model, 0.5))


@pytest.fixture(scope="session")
def pair_110(front_22, orbit_sym):
    return build_front_family(front_22, orbit_sym, (1, 1, 0))
