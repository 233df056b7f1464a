"""Testes das curvas com y = z: pesos fechados, fórmula fechada e números de interseção"""
import pytest
from sympy import QQ

from config.settings import CurveFamily, Formula
from core.classical_tr import tr_run
from core.errors import PreconditionError, PsiExtractionError
from core.exact_algebra import SYMBOLS, const, mrat_equal
from core.special_curves import (
    U1,
    U2,
    EdgeWeight,
    VertexWeight,
    closed_yz_table,
    curve_family,
    dijkgraaf_two_point,
    edge_weight_exponential,
    identity_2k,
    psi_extract,
    vertex_weight_closed,
    wk_identities,
    yz_closed_formula,
)
from tests.conftest import acceptance_spec, cubic_spec

z1, z2, z3 = (SYMBOLS.gen(i) for i in range(1, 4))


@pytest.fixture(scope="module")
def airy_closed():
    return closed_yz_table(curve_family(CurveFamily.AIRY))


class TestCurveFamily:

    def test_airy(self):
        spec = curve_family(CurveFamily.AIRY)
        assert mrat_equal(spec.x, z1**2 * const(QQ(1, 2)))
        assert mrat_equal(spec.y, z1)

    def test_witten(self):
        spec = curve_family(CurveFamily.WITTEN, r=3, epsilon="1")
        assert mrat_equal(spec.x, z1**3 - 3 * z1)
        assert spec.name == "witten-3"

    def test_theta(self):
        spec = curve_family(CurveFamily.THETA, r=2, lam="1/2")
        assert mrat_equal(spec.x, 1 / z1**2 - 1 / z1)

    @pytest.mark.parametrize("family", [CurveFamily.WITTEN, CurveFamily.HYPERMAP, CurveFamily.THETA])
    def test_r_below_two(self, family):
        with pytest.raises(PreconditionError):
            curve_family(family, r=1)


class TestWeights:

    @pytest.mark.parametrize("family", list(CurveFamily))
    @pytest.mark.parametrize("r", [2, 3])
    def test_closed_vertex_weight_matches_expansion(self, family, r):
        spec = curve_family(family, r=r, epsilon="1", lam="1")
        generic = VertexWeight.generic(spec.x, 4)
        closed = vertex_weight_closed(family, 4, r=r, epsilon="1", lam="1")
        assert generic.equals(closed), generic.series.first_difference(closed.series)

    def test_vertex_leading_term(self):
        weight = VertexWeight.generic(z1**3, 2)
        assert mrat_equal(weight.series.coeff((0, -1)), const(-1))

    def test_airy_vertex(self):
        weight = vertex_weight_closed(CurveFamily.AIRY, 2)
        assert mrat_equal(weight.series.coeff((2, 2)), const(QQ(1, 24)))

    @pytest.mark.parametrize("cutoff", [0, 2, 4])
    def test_edge_weight_geometric_equals_exponential(self, cutoff):
        closed = EdgeWeight(1, 2, cutoff).series()
        assert closed.equals(edge_weight_exponential(1, 2, cutoff))

    def test_edge_weight_leading_term(self):
        series = EdgeWeight(1, 2, 0).series()
        assert mrat_equal(series.coeff((0, 1, 1)), 1 / (z1 - z2) ** 2)


class TestClosedFormula:

    def test_unstable_disk(self, airy_closed):
        cd = airy_closed.entry(0, 1, 0)
        assert mrat_equal(cd.body, -z1**2)

    def test_annulus(self):
        cd = yz_closed_formula(z1**2 * const(QQ(1, 2)), 0, 2)
        assert mrat_equal(cd.body, 1 / (z1 - z2) ** 2)

    def test_airy_pair_of_pants(self, airy_closed):
        cd = airy_closed.entry(0, 3, 0)
        assert cd.formula is Formula.CLOSED_YZ
        assert mrat_equal(cd.body, 1 / (z1**2 * z2**2 * z3**2))

    def test_airy_torus(self, airy_closed):
        assert mrat_equal(airy_closed.get(1, 1, 0), const(QQ(1, 8)) / z1**4)

    @pytest.mark.parametrize("label", [(0, 3, 0), (1, 1, 0), (1, 2, 0)])
    def test_matches_classical_recursion(self, airy_closed, airy_table, label):
        assert mrat_equal(airy_closed.get(*label), airy_table.get(*label))

    def test_general_x(self, cubic):
        table = tr_run(cubic, 1)
        assert mrat_equal(yz_closed_formula(cubic_spec().x, 0, 3).body, table.get(0, 3, 0))

    @pytest.mark.slow
    def test_general_x_genus_one(self, cubic):
        table = tr_run(cubic, 1)
        assert mrat_equal(yz_closed_formula(cubic_spec().x, 1, 1).body, table.get(1, 1, 0))

    def test_cutoff_below_genus(self):
        with pytest.raises(PreconditionError):
            yz_closed_formula(z1**2, 2, 1, hbar_cutoff=2)

    def test_needs_y_equal_z(self):
        with pytest.raises(PreconditionError):
            closed_yz_table(acceptance_spec())

    def test_only_pure_x_entries(self, airy_closed):
        with pytest.raises(PreconditionError):
            airy_closed.entry(0, 2, 1)


class TestIntersectionNumbers:

    @pytest.mark.parametrize("g,m,ks,value", [
        (0, 3, (0, 0, 0), QQ(1)),
        (1, 1, (1,), QQ(1, 24)),
        (2, 1, (4,), QQ(1, 1152)),
    ])
    def test_known_values(self, airy_closed, g, m, ks, value):
        psi = psi_extract(airy_closed, g, m)
        assert psi.value(ks) == value
        assert all(psi.dimension_ok(k) for k in psi.entries)

    @pytest.mark.slow
    def test_genus_three(self, airy_closed):
        assert psi_extract(airy_closed, 3, 1).value((7,)) == QQ(1, 82944)

    @pytest.mark.slow
    def test_genus_three_from_classical_recursion(self, airy_table):
        assert psi_extract(airy_table, 3, 1).value((7,)) == QQ(1, 82944)

    def test_two_point_genus_one(self, airy_closed):
        psi = psi_extract(airy_closed, 1, 2)
        assert psi.value((0, 2)) == psi.value((1, 1)) == psi.value((2, 0)) == QQ(1, 24)

    @pytest.mark.parametrize("g,m", [(1, 1), (0, 3), (1, 2)])
    def test_same_from_classical_recursion(self, airy_closed, airy_table, g, m):
        assert psi_extract(airy_table, g, m).entries == psi_extract(airy_closed, g, m).entries

    def test_not_a_polynomial_in_inverse_z(self, joukowski_table):
        with pytest.raises(PsiExtractionError):
            psi_extract(joukowski_table, 1, 1)

    def test_payload(self, airy_closed):
        payload = psi_extract(airy_closed, 1, 1).to_dict()
        assert payload["g"] == 1
        assert payload["entries"][0]["k"] == [1]


class TestWittenKontsevich:

    def test_dijkgraaf_genus_one(self):
        poly = dijkgraaf_two_point(1)
        assert poly == (U1**2 + U1 * U2 + U2**2) * QQ(1, 24)

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_identity_2k(self, k):
        lhs, middle, rhs = identity_2k(k)
        assert mrat_equal(lhs, middle)
        assert mrat_equal(middle, rhs)

    def test_genus_one(self, airy_closed):
        report = wk_identities(1, airy_closed)
        assert report, report.to_dict()
        assert {item["check"] for item in report.items} == {"one_point", "two_point", "identity_2k"}

    @pytest.mark.slow
    def test_genus_two(self, airy_closed):
        assert wk_identities(2, airy_closed)

    def test_rejects_genus_zero(self):
        with pytest.raises(PreconditionError):
            wk_identities(0)
