"""Testes da curva espectral: validação, séries de deck e d_op"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import QQ

from config.settings import EngineConfig, Side
from core.errors import (
    CoincidentZerosError,
    IrrationalRamificationError,
    NonSimpleRamificationError,
    PrecisionCapExceededError,
    SingularCurveError,
)
from core.exact_algebra import SYMBOLS, expand_rational, from_coefficients, mrat_equal, taylor_at
from core.spectral_curve import CurveSpec, SpectralCurve, critical_points, ramification_points
from tests.conftest import airy_spec, cubic_spec, joukowski_spec

z1 = SYMBOLS.gen(1)


class TestRamificationPoints:

    def test_airy(self):
        assert [rp.location for rp in ramification_points(airy_spec())] == [QQ(0)]

    def test_joukowski(self):
        assert [rp.location for rp in ramification_points(joukowski_spec())] == [QQ(-1), QQ(1)]

    def test_cubic(self):
        assert SpectralCurve(cubic_spec()).locations(Side.X) == [QQ(-1), QQ(1)]

    def test_airy_y_side_is_empty(self, airy):
        assert airy.locations(Side.Y) == []

    def test_double_zero_is_rejected(self):
        spec = CurveSpec.from_coefficients("z3", [0, 0, 0, 1], [1], [0, 1], [1])
        with pytest.raises(NonSimpleRamificationError) as info:
            SpectralCurve(spec)
        assert "simple" in info.value.hypothesis

    def test_irrational_zero_is_rejected(self):
        # x' = z^2 - 2
        spec = CurveSpec.from_coefficients("irr", [0, -6, 0, 1], [3], [0, 1], [1])
        with pytest.raises(IrrationalRamificationError):
            SpectralCurve(spec)

    def test_dy_vanishing_at_branch_point(self):
        spec = CurveSpec.from_coefficients("coincident", [0, 0, "1/2"], [1], [0, 0, 1], [1])
        with pytest.raises(CoincidentZerosError):
            SpectralCurve(spec)

    def test_y_pole_at_branch_point(self):
        spec = CurveSpec.from_coefficients("pole", [0, 0, "1/2"], [1], [1], [0, 1])
        with pytest.raises(SingularCurveError):
            SpectralCurve(spec)

    def test_constant_y(self):
        spec = CurveSpec.from_coefficients("flat", [0, 0, 1], [1], [3], [1])
        with pytest.raises(SingularCurveError):
            SpectralCurve(spec)

    def test_critical_points_of_y(self):
        assert critical_points(from_coefficients([0, 1]), "y") == []


class TestDeckSeries:

    def test_airy_is_exact_reflection(self, airy):
        rp = airy.deck(0, Side.X, 8)
        assert rp.deck[0] == -1
        assert all(c == 0 for c in rp.deck[1:])

    def test_joukowski_is_inversion(self, joukowski):
        # sigma(z) = 1/z, logo sigma(1+t) = 1 - t + t^2 - ...
        rp = joukowski.deck(1, Side.X, 8)
        assert list(rp.deck) == [QQ((-1) ** k) for k in range(1, 9)]

    def test_cubic_second_coefficient(self, cubic):
        rp = cubic.deck(1, Side.X, 6)
        assert rp.deck[:2] == (QQ(-1), QQ(-1, 3))

    def test_order_is_widened(self, joukowski):
        small = joukowski.deck(-1, Side.X, 6)
        large = joukowski.deck(-1, Side.X, 20)
        assert large.order >= 20
        assert large.deck[:small.order] == small.deck

    def test_cap(self, airy):
        with pytest.raises(PrecisionCapExceededError):
            airy.deck(0, Side.X, EngineConfig.DECK_ORDER_CAP + 1)

    @pytest.mark.parametrize("spec", [airy_spec(), joukowski_spec(), cubic_spec()],
                             ids=lambda s: s.name)
    def test_involution_and_invariance(self, spec):
        curve = SpectralCurve(spec)
        for rp in curve.ramification_points(Side.X, 10):
            # a construção já recusa séries que não sejam involuções
            x_own = expand_rational(curve.x, {1: rp.point()}, rp.order, point=rp.location)
            x_image = expand_rational(curve.x, {1: rp.sigma_point()}, rp.order, point=rp.location)
            diff = x_own - x_image
            assert diff.is_zero()
            assert rp.deck[0] == -1


class TestDOp:

    def test_airy_x(self, airy):
        assert mrat_equal(airy.d_op(z1**2, 1, Side.X), 2)

    def test_y_side(self, airy):
        assert mrat_equal(airy.d_op(1 / z1, 1, Side.Y), -1 / z1**2)

    def test_joukowski_x(self, joukowski):
        assert mrat_equal(joukowski.d_op(z1, 1, Side.X), z1**2 / (z1**2 - 1))

    def test_other_variable(self, airy):
        z2 = SYMBOLS.gen(2)
        assert mrat_equal(airy.d_op(z2**3 / z1, 2, Side.X), 3 * z2 / z1)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(-5, 5), min_size=1, max_size=4),
           st.lists(st.integers(-5, 5), min_size=1, max_size=4))
    def test_derivation(self, a, b):
        curve = SpectralCurve(joukowski_spec())
        f, g = from_coefficients(a), from_coefficients(b)
        lhs = curve.d_op(f * g, 1)
        rhs = curve.d_op(f, 1) * g + f * curve.d_op(g, 1)
        assert mrat_equal(lhs, rhs)


class TestSwappedCurve:

    def test_roles_exchanged(self, airy):
        other = airy.swapped()
        assert mrat_equal(other.x, airy.y)
        assert mrat_equal(other.y, airy.x)

    def test_double_swap_is_identity(self, airy):
        assert airy.swapped().swapped() is airy

    def test_taylor_of_swapped(self, joukowski):
        other = joukowski.swapped()
        series = taylor_at(other.y, 1, (0, 3))
        assert series.rationals() == [QQ(2), QQ(0), QQ(1), QQ(-1)]
