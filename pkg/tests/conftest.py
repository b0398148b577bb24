import numpy as np
import pytest

from photonloss.codes import CodePair, builtin_code, transform_code
from photonloss.fock import StateVector
from photonloss.linopt import haar_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture(params=["fourphoton", "threephoton"])
def builtin(request):
    return builtin_code(request.param)


@pytest.fixture
def fourphoton():
    return builtin_code("fourphoton")


@pytest.fixture
def threephoton():
    return builtin_code("threephoton")


def spectator_code():
    """Four-photon code plus a spectator mode holding one photon; G = diag(2, 2, 1)."""
    s = 1 / np.sqrt(2)
    L = StateVector.from_terms(3, 5, [((0, 4, 1), s), ((4, 0, 1), s)])
    H = StateVector.ket((2, 2, 1))
    return CodePair(L, H, name="spectator")


@pytest.fixture
def spectator():
    return spectator_code()


@pytest.fixture
def complex_g_code():
    """Spectator code scrambled by a fixed network, so G is Hermitian with complex entries."""
    gamma = haar_unitary(3, np.random.default_rng(11))
    return transform_code(spectator_code(), gamma)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
