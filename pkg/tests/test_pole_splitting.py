"""Testes da separação de polos"""
import pytest
from sympy import QQ

from config.settings import Formula, Side
from core.errors import PoleSplitError
from core.exact_algebra import SYMBOLS, const, mrat_equal
from core.models import OmegaTable
from core.pole_splitting import neighbour_sum, split_fill, split_poles, splitting_producer
from core.spectral_curve import SpectralCurve
from tests.conftest import acceptance_spec, airy_spec, half_spec

z1, z2 = SYMBOLS.gen(1), SYMBOLS.gen(2)


@pytest.fixture(scope="module")
def airy_split():
    return split_fill(airy_spec(), 1)


@pytest.fixture(scope="module")
def acceptance_split():
    return split_fill(acceptance_spec(), 1)


@pytest.fixture(scope="module")
def half_split():
    return split_fill(half_spec(), 1)


class TestSplitPoles:

    def test_airy_genus_one(self, airy_mixed):
        rhs = neighbour_sum(airy_mixed, 1, 0, 0)
        left, right = split_poles(rhs, airy_mixed.curve, 1, 0, 0)
        assert left.label == (1, 1, 0) and right.label == (1, 0, 1)
        assert mrat_equal(left.body, const(QQ(1, 8)) / z1**4)
        assert not right.body
        assert left.formula is Formula.POLE_SPLITTING

    def test_zero_sum(self, airy_mixed):
        left, right = split_poles(const(0), airy_mixed.curve, 0, 1, 1)
        assert not left.body and not right.body

    def test_unclassified_pole(self, acceptance_mixed):
        # z = 5 não é zero de dx nem de dy
        with pytest.raises(PoleSplitError):
            split_poles(1 / (z1 - 5) ** 2, acceptance_mixed.curve, 1, 0, 0)

    def test_polynomial_part(self, acceptance_mixed):
        with pytest.raises(PoleSplitError):
            split_poles(z1**2, acceptance_mixed.curve, 1, 0, 0)

    def test_half_integer_locations(self):
        curve = SpectralCurve(half_spec(), (Side.X, Side.Y))
        dx_part = 1 / (z1 - const(QQ(1, 2))) ** 2 + 1 / (2 * z1 + 1) ** 4
        dy_part = const(5) / (z1 - const(QQ(3, 2))) ** 2
        left, right = split_poles(dx_part + dy_part, curve, 0, 0, 1)
        assert mrat_equal(left.body, dx_part)
        assert mrat_equal(right.body, dy_part)

    def test_diagonal_poles_follow_the_partner(self, acceptance_mixed):
        # z = m+1 = 2; z1 está no bloco x, z3 no bloco y
        rhs = 1 / (z2 - z1) ** 2 + 1 / (SYMBOLS.gen(3) - z2) ** 2
        left, right = split_poles(rhs, acceptance_mixed.curve, 0, 1, 1)
        assert mrat_equal(left.body, 1 / (SYMBOLS.gen(3) - z2) ** 2)
        assert mrat_equal(right.body, 1 / (z2 - z1) ** 2)


class TestSplitFill:

    @pytest.mark.parametrize("label", [(1, 1, 0), (0, 3, 0)])
    def test_classical_column_airy(self, airy_split, airy_table, label):
        assert mrat_equal(airy_split.get(*label), airy_table.get(*label))

    @pytest.mark.parametrize("label", [(1, 1, 0), (0, 3, 0)])
    def test_classical_column_acceptance(self, acceptance_split, acceptance_table, label):
        assert mrat_equal(acceptance_split.get(*label), acceptance_table.get(*label))

    @pytest.mark.parametrize("label", [(0, 2, 1), (0, 1, 2), (0, 0, 3), (1, 0, 1)])
    def test_mixed_entries(self, acceptance_split, acceptance_mixed, label):
        assert mrat_equal(acceptance_split.get(*label), acceptance_mixed.get(*label))

    def test_producer_fills_whole_level(self):
        table = OmegaTable(SpectralCurve(acceptance_spec(), (Side.X, Side.Y)), splitting_producer())
        cd = table.entry(0, 2, 1)
        assert cd.formula is Formula.POLE_SPLITTING
        assert {(0, 3, 0), (0, 1, 2), (0, 0, 3)} <= set(table.labels())

    def test_columns(self, acceptance_split):
        assert [cd.label for cd in acceptance_split.column(0)] == [(0, 3, 0), (1, 1, 0)]
        assert [cd.label for cd in acceptance_split.column(3)] == [(0, 0, 3)]

    @pytest.mark.parametrize("label", [(1, 1, 0), (0, 3, 0)])
    def test_classical_column_half_integer_points(self, half_split, half_table, label):
        assert mrat_equal(half_split.get(*label), half_table.get(*label))
