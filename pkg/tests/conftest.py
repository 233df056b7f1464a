"""Fixtures compartilhadas: curvas de teste e tabelas já preenchidas"""
import pytest

from config.settings import Side
from core.classical_tr import tr_run
from core.exact_algebra import SYMBOLS
from core.spectral_curve import CurveSpec, SpectralCurve
from core.term_executor import TermExecutor
from core.xy_swap_engine import mixed_table


def airy_spec() -> CurveSpec:
    # x = z^2/2, y = z
    return CurveSpec.from_coefficients("airy", [0, 0, "1/2"], [1], [0, 1], [1])


def joukowski_spec() -> CurveSpec:
    # x = z + 1/z, y = z
    return CurveSpec.from_coefficients("joukowski", [1, 0, 1], [0, 1], [0, 1], [1])


def cubic_spec() -> CurveSpec:
    # x = z^3 - 3z, y = z
    return CurveSpec.from_coefficients("cubic", [0, -3, 0, 1], [1], [0, 1], [1])


def acceptance_spec() -> CurveSpec:
    # x = z + 1/z, y = (z - 3)^2
    return CurveSpec.from_coefficients("acceptance", [1, 0, 1], [0, 1], [9, -6, 1], [1])


def half_spec() -> CurveSpec:
    # x = 4z + 1/z, y = (2z - 3)^2: ramificação em z = 1/2, -1/2 e 3/2
    return CurveSpec.from_coefficients("half", [1, 0, 4], [0, 1], [9, -12, 4], [1])


@pytest.fixture
def z():
    return [None] + [SYMBOLS.gen(i) for i in range(1, 7)]


@pytest.fixture
def airy():
    return SpectralCurve(airy_spec())


@pytest.fixture
def joukowski():
    return SpectralCurve(joukowski_spec())


@pytest.fixture
def cubic():
    return SpectralCurve(cubic_spec())


@pytest.fixture(scope="session")
def airy_table():
    return tr_run(SpectralCurve(airy_spec()), 2, TermExecutor(1))


@pytest.fixture(scope="session")
def joukowski_table():
    return tr_run(SpectralCurve(joukowski_spec()), 1, TermExecutor(1))


@pytest.fixture(scope="session")
def acceptance_table():
    return tr_run(SpectralCurve(acceptance_spec(), (Side.X, Side.Y)), 1, TermExecutor(1))


@pytest.fixture(scope="session")
def half_table():
    return tr_run(SpectralCurve(half_spec(), (Side.X, Side.Y)), 1, TermExecutor(1))


@pytest.fixture(scope="session")
def airy_mixed(airy_table):
    return mixed_table(airy_table)


@pytest.fixture(scope="session")
def acceptance_mixed(acceptance_table):
    return mixed_table(acceptance_table)
