"""Testes dos passos de troca x-y e dos verificadores das tabelas mistas"""
import pytest
from sympy import QQ

from config.settings import Direction, Formula, Method, Side
from core.classical_tr import corrupt_table
from core.errors import PreconditionError, UnstableEntryError
from core.exact_algebra import SYMBOLS, mrat_equal, rename
from core.models import CorrDiff
from core.xy_swap_engine import (
    WorkedRelation,
    check_loop_equations,
    check_parametric_duality,
    diagonal_regularity,
    mixed_labels,
    mixed_table,
    neighbour_exactness,
    pole_classes,
    r_loop_coefficient,
    shift_invariance_residual,
    step_simple,
    step_standard,
    worked_relation_residual,
)
from tests.conftest import acceptance_spec

z1, z2, z3 = (SYMBOLS.gen(i) for i in range(1, 4))

CHI_ONE = [(0, 2, 1), (0, 1, 2), (0, 0, 3), (1, 0, 1)]


class TestLabels:

    def test_chi_one(self):
        assert sorted(mixed_labels(1)) == sorted([(0, 3, 0), (1, 1, 0)] + CHI_ONE)

    def test_step_rejects_empty_label(self, airy_mixed):
        with pytest.raises(PreconditionError):
            step_simple(airy_mixed, Direction.X_TO_Y, 0, 0, 0)

    def test_step_rejects_negative(self, airy_mixed):
        with pytest.raises(PreconditionError):
            step_simple(airy_mixed, Direction.X_TO_Y, 0, -1, 2)


class TestAiryDualSide:

    @pytest.mark.parametrize("label", [(1, 0, 1), (0, 0, 3)])
    def test_trivial(self, airy_mixed, label):
        assert not airy_mixed.get(*label)

    @pytest.mark.slow
    def test_trivial_genus_one_two_points(self, airy_mixed):
        assert not airy_mixed.get(1, 0, 2)

    def test_unstable_mixed_convention(self, airy_mixed):
        assert mrat_equal(airy_mixed.get(0, 1, 1), -1 / (z1 - z2) ** 2)

    def test_formula_tags(self, airy_mixed):
        assert airy_mixed.entry(0, 2, 1).formula is Formula.SIMPLE_RECURSION
        assert airy_mixed.entry(0, 3, 0).formula is Formula.CLASSICAL_TR


class TestRecursionEquivalence:

    @pytest.mark.parametrize("g,m,n", [(0, 2, 0), (0, 1, 1), (0, 0, 2), (1, 0, 0)])
    def test_simple_equals_standard_acceptance(self, acceptance_mixed, g, m, n):
        simple = step_simple(acceptance_mixed, Direction.X_TO_Y, g, m, n)
        standard = step_standard(acceptance_mixed, Direction.X_TO_Y, g, m, n)
        assert simple.label == standard.label == (g, m, n + 1)
        assert mrat_equal(simple.body, standard.body)

    @pytest.mark.parametrize("g,m,n", [(0, 2, 0), (1, 0, 0)])
    def test_simple_equals_standard_airy(self, airy_mixed, g, m, n):
        simple = step_simple(airy_mixed, Direction.X_TO_Y, g, m, n)
        standard = step_standard(airy_mixed, Direction.X_TO_Y, g, m, n)
        assert mrat_equal(simple.body, standard.body)

    @pytest.mark.slow
    @pytest.mark.parametrize("g,m,n", [(1, 1, 0), (1, 0, 1), (0, 3, 0), (0, 2, 1), (0, 1, 2)])
    def test_simple_equals_standard_chi_two(self, acceptance_mixed, g, m, n):
        simple = step_simple(acceptance_mixed, Direction.X_TO_Y, g, m, n)
        standard = step_standard(acceptance_mixed, Direction.X_TO_Y, g, m, n)
        assert mrat_equal(simple.body, standard.body)

    @pytest.mark.slow
    def test_simple_equals_standard_airy_chi_two(self, airy_mixed):
        simple = step_simple(airy_mixed, Direction.X_TO_Y, 1, 1, 0)
        standard = step_standard(airy_mixed, Direction.X_TO_Y, 1, 1, 0)
        assert mrat_equal(simple.body, standard.body)

    @pytest.mark.parametrize("g,m,n", [(1, 0, 0), (0, 1, 1), (0, 2, 0)])
    def test_dual_direction_reproduces_table(self, acceptance_mixed, g, m, n):
        cd = step_simple(acceptance_mixed, Direction.Y_TO_X, g, m, n)
        assert cd.label == (g, m + 1, n)
        assert mrat_equal(cd.body, acceptance_mixed.get(g, m + 1, n))

    def test_both_method_table(self, acceptance_table):
        table = mixed_table(acceptance_table, Method.BOTH)
        for label in CHI_ONE:
            assert mrat_equal(table.get(*label), mixed_table(acceptance_table).get(*label))

    def test_symmetry_in_y_block(self, acceptance_mixed):
        body = acceptance_mixed.get(0, 0, 3)
        assert mrat_equal(rename(body, {1: 2, 2: 1}), body)
        assert mrat_equal(rename(body, {1: 3, 3: 1}), body)


class TestParametricDuality:

    @pytest.mark.parametrize("g,m,n", [(0, 1, 1), (1, 0, 0), (0, 2, 0)])
    def test_acceptance(self, acceptance_mixed, g, m, n):
        assert check_parametric_duality(acceptance_mixed, g, m, n)

    def test_report_payload(self, airy_mixed):
        report = check_parametric_duality(airy_mixed, 1, 0, 0)
        assert report.to_dict()["passed"] is True


class TestLoopEquations:

    @pytest.mark.parametrize("g,m,n", [(0, 1, 1), (1, 0, 0), (0, 0, 2)])
    def test_acceptance_both_sides(self, acceptance_mixed, g, m, n):
        report = check_loop_equations(acceptance_mixed, g, m, n, r_max=3)
        assert report, report.to_dict()

    def test_airy(self, airy_mixed):
        assert check_loop_equations(airy_mixed, 1, 0, 0, r_max=3)

    @pytest.mark.slow
    @pytest.mark.parametrize("g,m,n", [(1, 1, 0), (1, 0, 1), (0, 1, 2)])
    def test_acceptance_chi_two(self, acceptance_mixed, g, m, n):
        report = check_loop_equations(acceptance_mixed, g, m, n, r_max=3)
        assert report, report.to_dict()

    def test_corrupted_entry_is_caught(self, airy_table):
        bad = mixed_table(corrupt_table(airy_table, (1, 1, 0), 1 / z1**3))
        report = check_loop_equations(bad, 1, 0, 0, r_max=1, sides=(Side.X,))
        assert not report
        assert report.failures[0]["r"] == 1

    def test_r_must_be_positive(self, airy_mixed):
        with pytest.raises(PreconditionError):
            r_loop_coefficient(airy_mixed, Side.X, 0, 1, 0, 0)


class TestWorkedRelations:

    def test_genus_one_one_point_airy(self, airy_mixed):
        assert not worked_relation_residual(airy_mixed, WorkedRelation.GENUS1_ONE_POINT)

    def test_genus_one_one_point_acceptance(self, acceptance_mixed):
        assert not worked_relation_residual(acceptance_mixed, WorkedRelation.GENUS1_ONE_POINT)

    @pytest.mark.parametrize("a,b", [(2, 0), (1, 1), (0, 2)])
    def test_genus_zero_three_point(self, acceptance_mixed, a, b):
        assert not worked_relation_residual(acceptance_mixed, WorkedRelation.GENUS0, a, b)

    def test_genus_zero_needs_spectators(self, acceptance_mixed):
        with pytest.raises(PreconditionError):
            worked_relation_residual(acceptance_mixed, WorkedRelation.GENUS0, 0, 0)

    @pytest.mark.slow
    @pytest.mark.parametrize("spectator", [Side.X, Side.Y])
    def test_genus_one_two_point(self, acceptance_mixed, spectator):
        assert not worked_relation_residual(acceptance_mixed, WorkedRelation.GENUS1_TWO_POINT,
                                            spectator=spectator)

    @pytest.mark.slow
    def test_genus_two_one_point_airy(self, airy_mixed):
        assert not worked_relation_residual(airy_mixed, WorkedRelation.GENUS2_ONE_POINT)


class TestInvariantScans:

    @pytest.mark.parametrize("label", CHI_ONE + [(0, 3, 0), (1, 1, 0)])
    def test_diagonal_regularity(self, acceptance_mixed, label):
        assert diagonal_regularity(acceptance_mixed.entry(*label), acceptance_mixed.curve)

    def test_regularized_two_point(self, acceptance_mixed):
        assert diagonal_regularity(acceptance_mixed.entry(0, 2, 0), acceptance_mixed.curve)

    def test_unstable_rejected(self, acceptance_mixed):
        with pytest.raises(UnstableEntryError):
            diagonal_regularity(acceptance_mixed.entry(0, 1, 1), acceptance_mixed.curve)

    def test_within_block_pole_detected(self, acceptance_mixed):
        fake = CorrDiff(0, 0, 3, 1 / (z1 - z2) ** 2)
        assert not diagonal_regularity(fake, acceptance_mixed.curve)

    @pytest.mark.parametrize("label", CHI_ONE + [(0, 3, 0)])
    def test_pole_classes(self, acceptance_mixed, label):
        report = pole_classes(acceptance_mixed.entry(*label), acceptance_mixed.curve)
        assert report, report.to_dict()

    def test_misplaced_pole(self, acceptance_mixed):
        # y-block variable with a pole at a zero of dx
        fake = CorrDiff(0, 1, 2, 1 / ((z2 - 1) ** 2 * (z1 + 1) ** 2 * (z3 - 3) ** 2))
        report = pole_classes(fake, acceptance_mixed.curve)
        assert not report
        assert report.offending[0]["var"] == 2

    @pytest.mark.parametrize("g,m,n", [(0, 2, 0), (0, 1, 1), (1, 0, 0)])
    def test_neighbour_exactness(self, acceptance_mixed, g, m, n):
        assert neighbour_exactness(acceptance_mixed, g, m, n)


class TestShiftInvariance:

    def test_mixed_entry(self):
        assert not shift_invariance_residual(acceptance_spec(), QQ(5, 2), 0, 1, 2)

    def test_graph_sum(self):
        assert not shift_invariance_residual(acceptance_spec(), 2, 1, 0, 1, method=Method.GRAPH)

    def test_unstable_rejected(self):
        with pytest.raises(UnstableEntryError):
            shift_invariance_residual(acceptance_spec(), 1, 0, 1, 0)

    def test_graph_needs_pure_y_label(self):
        with pytest.raises(PreconditionError):
            shift_invariance_residual(acceptance_spec(), 1, 0, 1, 2, method=Method.GRAPH)
