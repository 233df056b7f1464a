"""Testes da recursão clássica e dos verificadores de laço"""
import pytest
from sympy import QQ

from config.settings import Formula, Side
from core.classical_tr import (
    bracket,
    check_linear_loop,
    check_projection,
    check_quadratic_loop,
    corrupt_table,
    exactness_check,
    probe_sets,
    quadratic_loop_function,
    stable_labels,
    tr_run,
    xi_membership,
)
from core.errors import PreconditionError, UnstableEntryError
from core.exact_algebra import SYMBOLS, LaurentData, const, mrat_equal, pole_locations, rename, to_rational
from core.term_executor import TermExecutor
from tests.conftest import joukowski_spec

z1, z2, z3, z4 = (SYMBOLS.gen(i) for i in range(1, 5))


class TestAiryRecursion:

    def test_three_point(self, airy_table):
        assert mrat_equal(airy_table.get(0, 3, 0), 1 / (z1**2 * z2**2 * z3**2))

    def test_one_point_genus_one(self, airy_table):
        assert mrat_equal(airy_table.get(1, 1, 0), const(QQ(1, 8)) / z1**4)

    def test_four_point(self, airy_table):
        # <tau_0^3 tau_1> = 1
        expected = 3 * (1 / z1**2 + 1 / z2**2 + 1 / z3**2 + 1 / z4**2) / (z1 * z2 * z3 * z4) ** 2
        assert mrat_equal(airy_table.get(0, 4, 0), expected)

    def test_two_point_genus_one(self, airy_table):
        # <tau_1 tau_1>_1 = <tau_0 tau_2>_1 = 1/24
        expected = (const(QQ(3, 8)) / (z1**4 * z2**4)
                    + const(QQ(5, 8)) * (1 / (z1**6 * z2**2) + 1 / (z1**2 * z2**6)))
        assert mrat_equal(airy_table.get(1, 2, 0), expected)

    def test_unstable_passthrough(self, airy_table):
        assert mrat_equal(airy_table.get(0, 1, 0), -z1**2)
        assert mrat_equal(airy_table.get(0, 2, 0), 1 / (z1 - z2) ** 2)

    def test_formula_tag(self, airy_table):
        assert airy_table.entry(1, 1, 0).formula is Formula.CLASSICAL_TR

    def test_bracket_genus_one(self, airy_table):
        # q = z2, sigma(q) = z3
        assert mrat_equal(bracket(airy_table, 1, 1), 1 / (z2 - z3) ** 2)

    def test_symmetry(self, airy_table):
        body = airy_table.get(0, 4, 0)
        assert mrat_equal(rename(body, {1: 3, 3: 1}), body)
        assert mrat_equal(rename(body, {2: 4, 4: 2}), body)


class TestTableFill:

    def test_labels_in_fill_order(self):
        assert stable_labels(2) == [(1, 1, 0), (0, 3, 0), (1, 2, 0), (0, 4, 0)]

    def test_chi_must_be_positive(self, airy):
        with pytest.raises(PreconditionError):
            tr_run(airy, 0)

    def test_lazy_entry_beyond_bound(self, airy_table):
        assert airy_table.euler_bound >= 2
        body = airy_table.get(2, 1, 0)
        # <tau_4>_2 = 1/1152, (2*4+1)!! = 945
        assert mrat_equal(body, const(QQ(945, 1152)) / z1**10)

    def test_parallel_matches_serial(self):
        serial = tr_run(joukowski_spec(), 1, TermExecutor(1))
        parallel = tr_run(joukowski_spec(), 1, TermExecutor(4))
        for label in serial.labels():
            assert mrat_equal(serial.get(*label), parallel.get(*label))

    def test_poles_only_at_branch_points(self, joukowski_table):
        for g, m, _ in stable_labels(1):
            body = joukowski_table.get(g, m, 0)
            for var in range(1, m + 1):
                locs = {to_rational(p) for p in pole_locations(body, var)}
                assert locs <= {QQ(-1), QQ(1)}


class TestXiMembership:

    def test_simple_pole(self, airy):
        rp = airy.deck(0)
        assert xi_membership(1 / z1, rp)

    def test_even_pole(self, airy):
        rp = airy.deck(0)
        assert not xi_membership(1 / z1**2, rp)

    def test_odd_pole(self, airy):
        rp = airy.deck(0)
        assert xi_membership(1 / z1**3, rp)

    def test_laurent_input(self, airy):
        rp = airy.deck(0)
        odd = LaurentData(QQ(0), -3, tuple(const(c) for c in (1, 0, 0, 0, 5, 0)))
        even = LaurentData(QQ(0), -2, tuple(const(c) for c in (1, 0, 0, 0, 0)))
        assert xi_membership(odd, rp, curve=airy)
        assert not xi_membership(even, rp, curve=airy)

    def test_joukowski_odd_part(self, joukowski):
        # h(z) - h(1/z) é anti-invariante sob sigma(z) = 1/z
        rp = joukowski.deck(1)
        assert xi_membership((1 + z1**3) / (z1 - 1) ** 3, rp, curve=joukowski)
        assert not xi_membership(1 / (z1 - 1) ** 2, rp, curve=joukowski)


class TestLoopEquations:

    @pytest.mark.parametrize("g,m", [(0, 2), (1, 0), (1, 1), (0, 3)])
    def test_linear_airy(self, airy_table, g, m):
        rp = airy_table.curve.deck(0)
        assert check_linear_loop(airy_table, g, m, rp)

    @pytest.mark.parametrize("g,m", [(0, 1), (1, 0), (0, 2), (1, 1)])
    def test_quadratic_airy(self, airy_table, g, m):
        rp = airy_table.curve.deck(0)
        assert check_quadratic_loop(airy_table, g, m, rp)

    def test_quadratic_genus_one_cancels(self, airy_table):
        assert not quadratic_loop_function(airy_table, 1, 0)

    def test_corrupted_linear(self, airy_table):
        bad = corrupt_table(airy_table, (1, 1, 0), 1 / z1**3)
        assert not check_linear_loop(bad, 1, 0, airy_table.curve.deck(0))

    def test_corrupted_quadratic(self, airy_table):
        bad = corrupt_table(airy_table, (1, 1, 0), 1 / z1**4)
        rp = airy_table.curve.deck(0)
        assert check_linear_loop(bad, 1, 0, rp)
        assert not check_quadratic_loop(bad, 1, 0, rp)

    @pytest.mark.slow
    def test_joukowski_all_points(self, joukowski_table):
        curve = joukowski_table.curve
        for rp in curve.ramification_points(Side.X):
            for g, m in [(0, 2), (1, 0), (0, 1)]:
                assert check_linear_loop(joukowski_table, g, m, rp)
                assert check_quadratic_loop(joukowski_table, g, m, rp)


class TestProbes:

    def test_deterministic(self, joukowski):
        assert probe_sets(joukowski, [1, 2], seed=7) == probe_sets(joukowski, [1, 2], seed=7)

    def test_avoids_special_points(self, joukowski):
        for probes in probe_sets(joukowski, [1, 2, 3], seed=11, sets=5):
            values = list(probes.values())
            assert len(set(values)) == len(values)
            assert not set(values) & {QQ(0), QQ(1), QQ(-1)}


class TestProjectionAndExactness:

    def test_projection_airy(self, airy_table):
        assert check_projection(airy_table, 1, 1)
        assert check_projection(airy_table, 0, 3)

    def test_projection_joukowski(self, joukowski_table):
        assert check_projection(joukowski_table, 1, 1)

    def test_projection_rejects_unstable(self, airy_table):
        with pytest.raises(UnstableEntryError):
            check_projection(airy_table, 0, 2)

    def test_projection_fails_with_polynomial_part(self, airy_table):
        bad = corrupt_table(airy_table, (1, 1, 0), z1)
        assert not check_projection(bad, 1, 1)

    def test_exact(self):
        assert exactness_check(1 / z1**2)

    def test_not_exact(self):
        assert not exactness_check(1 / z1)

    def test_not_exact_at_half_integer(self):
        assert not exactness_check(1 / (2 * z1 - 1))
        assert exactness_check(1 / (2 * z1 - 1) ** 2 + 1 / (2 * z1 - 3) ** 2)


class TestHalfIntegerBranchPoints:

    def test_branch_points(self, half_table):
        assert half_table.curve.locations(Side.X) == [QQ(-1, 2), QQ(1, 2)]
        assert half_table.curve.locations(Side.Y) == [QQ(3, 2)]

    def test_three_point(self, half_table):
        # soma sobre a de prod B(a, z_i) / (x''(a) y'(a))
        def bb(a):
            return 1 / ((z1 - a) * (z2 - a) * (z3 - a)) ** 2

        expected = bb(const(QQ(1, 2))) * const(QQ(-1, 128)) + bb(const(QQ(-1, 2))) * const(QQ(1, 256))
        assert mrat_equal(half_table.get(0, 3, 0), expected)

    def test_poles_only_at_branch_points(self, half_table):
        for g, m, _ in stable_labels(1):
            body = half_table.get(g, m, 0)
            for var in range(1, m + 1):
                locs = {to_rational(p) for p in pole_locations(body, var)}
                assert locs <= {QQ(-1, 2), QQ(1, 2)}

    @pytest.mark.parametrize("g,m", [(1, 1), (0, 3)])
    def test_projection(self, half_table, g, m):
        assert check_projection(half_table, g, m)

    @pytest.mark.slow
    @pytest.mark.parametrize("g,m", [(0, 2), (1, 0), (0, 1)])
    def test_loop_equations_each_point(self, half_table, g, m):
        for rp in half_table.curve.ramification_points(Side.X):
            assert check_linear_loop(half_table, g, m, rp)
            assert check_quadratic_loop(half_table, g, m, rp)

    def test_corrupted_projection(self, half_table):
        bad = corrupt_table(half_table, (1, 1, 0), 1 / (2 * z1 - 1))
        assert not check_projection(bad, 1, 1)
