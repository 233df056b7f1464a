"""
Curvas com y = z.

Com y = z a recursão do lado y é trivial, e a troca x-y lida ao contrário
dá uma fórmula fechada para omega^(g)_{m,0}: soma sobre grafos simples
conexos com pesos de vértice W_i e de aresta W_{i,j}, seguida de D_x^r [w^r].

Aqui também ficam os pesos de vértice em forma fechada das famílias
clássicas, a extração dos números <tau_k1 ... tau_km>_g na curva de Airy e as
identidades de Witten-Kontsevich.
"""
import math
import uuid
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from sympy import QQ, binomial, factorial2
from sympy.polys.rings import ring as poly_ring

from config.settings import CurveFamily, Formula
from core.errors import PreconditionError, PsiExtractionError
from core.exact_algebra import (
    ONE,
    SYMBOLS,
    ZERO,
    HbarSeries,
    MRat,
    const,
    format_rational,
    mrat_diff,
    mrat_equal,
    parse_rational,
    rename,
    s_coefficient,
    substitute,
    to_mrat,
)
from core.graphs import Graph, enumerate_simple_graphs
from core.models import CorrDiff, OmegaTable, PsiTable, TableView, check_label
from core.operator_series import s_operator_terms
from core.spectral_curve import CurveSpec, SpectralCurve
from core.term_executor import TermExecutor
from utils.logger import get_logger


logger = get_logger("special_curves")

VERTEX_PARAMS = ("w",)
EDGE_PARAMS = ("wa", "wb")

U_RING, U1, U2 = poly_ring("u1,u2", QQ)


def _q(value: Any):
    return QQ.from_sympy(value)


# ---------------------------------------------------------------------------
# Família de curvas
# ---------------------------------------------------------------------------

def curve_family(kind: CurveFamily, **params: Any) -> CurveSpec:
    """
    Curvas (x, y = z):

    * airy: x = z^2/2
    * witten: x = z^r - r eps z
    * hypermap: x = z^(r-1) + 1/z
    * theta: x = z^(-r) - r lam^(r-1)/z
    """
    kind = CurveFamily(kind)
    z = SYMBOLS.gen(1)
    if kind is CurveFamily.AIRY:
        return CurveSpec("airy", z**2 * const(QQ(1, 2)), z)
    r = int(params.get("r", 2))
    if kind is CurveFamily.WITTEN:
        eps = parse_rational(params.get("epsilon", 0))
        if r < 2:
            raise PreconditionError("r-spin curves need r >= 2", r=r)
        return CurveSpec(f"witten-{r}", z**r - z * const(r * eps), z)
    if kind is CurveFamily.HYPERMAP:
        if r < 2:
            raise PreconditionError("hypermap curves need r >= 2", r=r)
        return CurveSpec(f"hypermap-{r}", z**(r - 1) + ONE / z, z)
    lam = parse_rational(params.get("lam", 1))
    if r < 2:
        raise PreconditionError("theta curves need r >= 2", r=r)
    return CurveSpec(f"theta-{r}", ONE / z**r - const(r * lam**(r - 1)) / z, z)


# ---------------------------------------------------------------------------
# Pesos de vértice e de aresta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexWeight:
    """
    W = -(1/w) e^{-w (S(w hbar d_z) - 1) x(z)} em z_1, sem o fator dz.

    O termo de hbar^0 é -1/w; os demais carregam hbar^2 ou mais.
    """
    label: str
    series: HbarSeries

    @property
    def cutoff(self) -> int:
        return self.series.cutoff

    @classmethod
    def from_exponent(cls, label: str, cutoff: int, exponent: Dict[Tuple[int, int], MRat]) -> "VertexWeight":
        e = HbarSeries(cutoff, VERTEX_PARAMS, exponent)
        factor = e.exp() if e else HbarSeries.constant(cutoff, VERTEX_PARAMS)
        return cls(label, (-factor).shift((0, -1)))

    @classmethod
    def generic(cls, x: MRat, cutoff: int) -> "VertexWeight":
        """Expansão do operador S: -sum_k c_{2k} w^{2k+1} hbar^{2k} d_z^{2k} x"""
        exponent = {}
        derivative = x
        for k in range(1, cutoff // 2 + 1):
            derivative = mrat_diff(mrat_diff(derivative, 1), 1)
            if derivative:
                exponent[(2 * k, 2 * k + 1)] = -derivative * const(s_coefficient(2 * k))
        return cls.from_exponent("generic", cutoff, exponent)

    def placed(self, var: int, params: Tuple[str, ...], position: int) -> HbarSeries:
        """A mesma série em z_var, com w no parâmetro params[position]"""
        coeffs = {}
        for (h, p), c in self.series.coeffs.items():
            key = [h] + [0] * len(params)
            key[position + 1] = p
            coeffs[tuple(key)] = rename(c, {1: var})
        return HbarSeries(self.cutoff, params, coeffs)

    def equals(self, other: "VertexWeight") -> bool:
        return self.series.with_cutoff(min(self.cutoff, other.cutoff)).equals(
            other.series.with_cutoff(min(self.cutoff, other.cutoff)))


def _odd_power_terms(cutoff: int, weight) -> Dict[Tuple[int, int], MRat]:
    """Termos j ímpar >= 3 de um expoente (1/hbar) sum_j a_j (w hbar)^j, com a_j = weight(j)"""
    out = {}
    for j in range(3, cutoff + 2, 2):
        c = weight(j)
        if c:
            out[(j - 1, j)] = c
    return out


def _merge(*parts: Dict[Tuple[int, int], MRat]) -> Dict[Tuple[int, int], MRat]:
    out: Dict[Tuple[int, int], MRat] = {}
    for part in parts:
        for k, v in part.items():
            out[k] = out.get(k, ZERO) + v
    return out


def _polynomial_exponent(p: int, cutoff: int) -> Dict[Tuple[int, int], MRat]:
    """((z - w hbar/2)^p - (z + w hbar/2)^p + p w hbar z^(p-1)) / (hbar p)"""
    z = SYMBOLS.gen(1)
    return _odd_power_terms(
        cutoff, lambda j: z**(p - j) * const(-2 * _q(binomial(p, j)) / (2**j * p)) if j <= p else ZERO)


def _log_exponent(scale, cutoff: int) -> Dict[Tuple[int, int], MRat]:
    """(scale/hbar) (log((1 - u)/(1 + u)) + 2u), u = w hbar/(2z)"""
    z = SYMBOLS.gen(1)
    return _odd_power_terms(cutoff, lambda j: const(-2 * scale / (2**j * j)) / z**j)


def vertex_weight_closed(family: CurveFamily, cutoff: int, **params: Any) -> VertexWeight:
    """
    Peso de vértice pela forma fechada de cada família, expandido em hbar.

    Os fatores (...)^{c/hbar} só fazem sentido pela expansão: o logaritmo
    log((1-u)/(1+u)) + 2u começa em u^3.
    """
    family = CurveFamily(family)
    r = int(params.get("r", 2))
    if family is CurveFamily.AIRY:
        return VertexWeight.from_exponent(family.value, cutoff, {(2, 3): const(QQ(-1, 24))} if cutoff >= 2 else {})
    if family is CurveFamily.WITTEN:
        # não depende de eps
        return VertexWeight.from_exponent(family.value, cutoff, _polynomial_exponent(r + 1, cutoff))
    if family is CurveFamily.HYPERMAP:
        return VertexWeight.from_exponent(
            family.value, cutoff, _merge(_log_exponent(QQ.one, cutoff), _polynomial_exponent(r, cutoff)))
    lam = parse_rational(params.get("lam", 1))
    scale = -r * lam**(r - 1)
    z = SYMBOLS.gen(1)
    rational_part = _odd_power_terms(
        cutoff, lambda j: const(2 * _q(binomial(1 - r, j)) / (2**j * (r - 1))) / z**(r - 1 + j))
    return VertexWeight.from_exponent(family.value, cutoff, _merge(_log_exponent(scale, cutoff), rational_part))


@dataclass(frozen=True)
class EdgeWeight:
    """W_{i,j} = w_i w_j / ((z_i - z_j)^2 - hbar^2 (w_i + w_j)^2 / 4), série geométrica em hbar^2"""
    i: int
    j: int
    cutoff: int

    def series(self) -> HbarSeries:
        d2 = (SYMBOLS.gen(self.i) - SYMBOLS.gen(self.j)) ** 2
        coeffs = {}
        for level in range(self.cutoff // 2 + 1):
            base = ONE / d2 ** (level + 1)
            for a in range(2 * level + 1):
                c = _q(binomial(2 * level, a)) / 4**level
                coeffs[(2 * level, 1 + a, 1 + 2 * level - a)] = base * const(c)
        return HbarSeries(self.cutoff, EDGE_PARAMS, coeffs)

    def placed(self, params: Tuple[str, ...], m_offset: int = 1) -> HbarSeries:
        coeffs = {}
        for (h, a, b), c in self.series().coeffs.items():
            key = [h] + [0] * len(params)
            key[self.i - m_offset + 1] += a
            key[self.j - m_offset + 1] += b
            coeffs[tuple(key)] = c
        return HbarSeries(self.cutoff, params, coeffs)


def edge_weight_exponential(i: int, j: int, cutoff: int) -> HbarSeries:
    """(e^{hbar^2 w_i w_j S(w_i hbar d_i) S(w_j hbar d_j) (z_i - z_j)^-2} - 1) / hbar^2"""
    inner = cutoff + 2
    f = ONE / (SYMBOLS.gen(i) - SYMBOLS.gen(j)) ** 2
    coeffs = {}
    for (a, b), term in s_operator_terms(f, [i, j], (inner - 2) // 2, mrat_diff).items():
        coeffs[(2 + 2 * a + 2 * b, 1 + 2 * a, 1 + 2 * b)] = term
    exponent = HbarSeries(inner, EDGE_PARAMS, coeffs)
    shifted = (exponent.exp() - HbarSeries.constant(inner, EDGE_PARAMS)).shift((-2, 0, 0))
    return shifted.with_cutoff(cutoff)


# ---------------------------------------------------------------------------
# Fórmula fechada
# ---------------------------------------------------------------------------

def _d_x(f: MRat, x: MRat, var: int, times: int) -> MRat:
    xp = rename(mrat_diff(x, 1), {1: var})
    for _ in range(times):
        f = mrat_diff(f / xp, var)
    return f


def yz_closed_formula(x: MRat, g: int, m: int, hbar_cutoff: Optional[int] = None,
                      executor: Optional[TermExecutor] = None,
                      vertex: Optional[VertexWeight] = None) -> CorrDiff:
    """
    omega^(g)_{m,0} da curva (x, y = z):

        [hbar^2g] sum_r prod D_{x_i}^{r_i} [w_i^{r_i}] sum_Gamma hbar^{2 betti} prod W_{i,j} prod W_i

    com Gamma percorrendo os grafos simples conexos em m vértices.
    """
    check_label(g, m, 0)
    x = to_mrat(x)
    if (g, m) == (0, 1):
        return CorrDiff(0, 1, 0, -SYMBOLS.gen(1) * mrat_diff(x, 1), Formula.UNSTABLE)
    cutoff = 2 * g if hbar_cutoff is None else hbar_cutoff
    if cutoff < 2 * g:
        raise PreconditionError("hbar cutoff below 2g", g=g, cutoff=cutoff)
    SYMBOLS.check(m)
    vertex = vertex or VertexWeight.generic(x, cutoff)
    params = tuple(f"w{i}" for i in range(1, m + 1))
    vertices = [vertex.placed(i, params, i - 1) for i in range(1, m + 1)]
    graphs = enumerate_simple_graphs(m, max_betti=g)
    edges = {}
    for graph in graphs:
        for e in graph.edges:
            if e not in edges:
                edges[e] = EdgeWeight(e[0], e[1], cutoff).placed(params)

    def term(graph: Graph) -> HbarSeries:
        series = HbarSeries.constant(cutoff, params).shift((2 * graph.betti,) + (0,) * m)
        for e in graph.edges:
            series = series * edges[e]
        for v in vertices:
            series = series * v
        return series

    executor = executor or TermExecutor(1)
    with logger.execution_context(str(uuid.uuid4()), "yz_closed_formula", g=g, m=m, graphs=len(graphs)):
        total = executor.reduce_sum(term, graphs, HbarSeries(cutoff, params), label=f"yz_{g}_{m}")
        body = ZERO
        for key, coeff in sorted(total.hbar_part(2 * g).coeffs.items()):
            powers = key[1:]
            if any(p < 0 for p in powers):
                continue
            value = coeff
            for var, p in enumerate(powers, start=1):
                value = _d_x(value, x, var, p)
            body += value
    return CorrDiff(g, m, 0, body, Formula.CLOSED_YZ)


def yz_producer(x: MRat, executor: Optional[TermExecutor] = None, hbar_cutoff: Optional[int] = None):
    """Produtor de OmegaTable para a coluna n = 0 da curva (x, z)"""

    def produce(table: OmegaTable, g: int, m: int, n: int) -> CorrDiff:
        if n:
            raise PreconditionError("the y = z closed formula produces n = 0 entries only", n=n)
        cutoff = None if hbar_cutoff is None else max(hbar_cutoff, 2 * g)
        return yz_closed_formula(x, g, m, cutoff, executor=executor)

    return produce


def closed_yz_table(spec: CurveSpec, executor: Optional[TermExecutor] = None,
                    hbar_cutoff: Optional[int] = None) -> OmegaTable:
    """Tabela preguiçosa pela fórmula fechada; exige y = z"""
    if not mrat_equal(spec.y, SYMBOLS.gen(1)):
        raise PreconditionError(f"curve {spec.name} does not have y = z")
    return OmegaTable(SpectralCurve(spec), yz_producer(spec.x, executor, hbar_cutoff))


# ---------------------------------------------------------------------------
# Números de interseção
# ---------------------------------------------------------------------------

def _double_factorial(n: int):
    return _q(factorial2(n))


def psi_extract(table: TableView, g: int, m: int) -> PsiTable:
    """
    <tau_k1 ... tau_km>_g lidos de omega^(g)_{m,0} = sum <...> prod (2k_i+1)!!/z_i^(2k_i+2) dz_i
    (curva x = z^2/2, y = z). Em t_i = 1/z_i a entrada é um polinômio.
    """
    check_label(g, m, 0)
    body = table.get(g, m, 0)
    inverted = substitute(body, {i: ONE / SYMBOLS.gen(i) for i in range(1, m + 1)})
    if not inverted.denom.is_ground:
        raise PsiExtractionError(f"omega^({g})_{{{m},0}} is not a polynomial in 1/z", g=g, m=m)
    scale = QQ.convert(inverted.denom.LC)
    entries: Dict[Tuple[int, ...], Any] = {}
    dimension = 3 * g - 3 + m
    indices = [SYMBOLS.index(i) for i in range(1, m + 1)]
    for monom, coeff in inverted.numer.terms():
        exps = [monom[i] for i in indices]
        if any(e % 2 or e < 2 for e in exps) or sum(e // 2 - 1 for e in exps) != dimension:
            raise PsiExtractionError(
                f"unexpected monomial {exps} in omega^({g})_{{{m},0}}", g=g, m=m, exponents=exps)
        ks = tuple(e // 2 - 1 for e in exps)
        norm = QQ.one
        for k in ks:
            norm *= _double_factorial(2 * k + 1)
        entries[ks] = QQ.convert(coeff) / scale / norm
    psi = PsiTable(g, m, entries)
    logger.debug("psi_extracted", g=g, m=m, entries=len(entries))
    return psi


@dataclass
class WKReport:
    passed: bool = True
    items: List[Dict[str, Any]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    def add(self, check: str, passed: bool, **details: Any):
        self.passed = self.passed and passed
        self.items.append({"check": check, "passed": passed, **details})

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "items": self.items}


def dijkgraaf_two_point(g: int):
    """
    sum u1^i u2^j <tau_i tau_j>_g como polinômio de U_RING:
    sum_{i+k=g} (u1^3+u2^3)^i (u1+u2)^(k-1) (u1 u2)^k / (24^i i! 4^k (2k+1)!!)
    """
    total = U_RING.zero
    for i in range(g + 1):
        k = g - i
        c = QQ(1, 24**i * math.factorial(i) * 4**k) / _double_factorial(2 * k + 1)
        total += (U1**3 + U2**3) ** i * (U1 + U2) ** k * (U1 * U2) ** k * c
    return total.exquo(U1 + U2)


def _d_minus_airy(f: MRat, var: int) -> MRat:
    """D_{-x} f = -d(f/z) para x = z^2/2"""
    return -mrat_diff(f / SYMBOLS.gen(var), var)


def identity_2k(k: int) -> Tuple[MRat, MRat, MRat]:
    """
    Os três lados de (D_{-x1} + D_{-x2})^(k+1) dz1 dz2/(z1-z2)^(2k+2)
    = (2k+1)!! dz1 dz2/(z1 z2)^(2k+2) = (D_{-x1} D_{-x2})^(k+1) dz1 dz2 / (2k+1)!!.
    """
    z1, z2 = SYMBOLS.gen(1), SYMBOLS.gen(2)
    lhs = ONE / (z1 - z2) ** (2 * k + 2)
    for _ in range(k + 1):
        lhs = _d_minus_airy(lhs, 1) + _d_minus_airy(lhs, 2)
    middle = const(_double_factorial(2 * k + 1)) / (z1 * z2) ** (2 * k + 2)
    rhs = ONE
    for _ in range(k + 1):
        rhs = _d_minus_airy(_d_minus_airy(rhs, 1), 2)
    return lhs, middle, rhs * const(1 / _double_factorial(2 * k + 1))


def wk_identities(g_max: int, table: Optional[TableView] = None,
                  executor: Optional[TermExecutor] = None) -> WKReport:
    """
    Identidades de Witten-Kontsevich até g_max: <tau_{3g-2}>_g = 1/(24^g g!),
    a função de dois pontos e a identidade de (D1 + D2)^(k+1).
    """
    if g_max < 1:
        raise PreconditionError("g_max must be at least 1", g_max=g_max)
    table = table or closed_yz_table(curve_family(CurveFamily.AIRY), executor)
    report = WKReport()
    for g in range(1, g_max + 1):
        expected = QQ(1, 24**g * math.factorial(g))
        found = psi_extract(table, g, 1).value((3 * g - 2,))
        report.add("one_point", found == expected, g=g,
                   expected=format_rational(expected), found=format_rational(found))

        psi = psi_extract(table, g, 2)
        generating = dijkgraaf_two_point(g)
        mismatches = []
        for a in range(3 * g):
            b = 3 * g - 1 - a
            coeff = QQ.convert(generating.coeff(U1**a * U2**b))
            if coeff != psi.value((a, b)):
                mismatches.append({"k": [a, b], "expected": format_rational(coeff),
                                   "found": format_rational(psi.value((a, b)))})
        report.add("two_point", not mismatches, g=g, mismatches=mismatches or None)
    for k in range(g_max + 1):
        lhs, middle, rhs = identity_2k(k)
        report.add("identity_2k", mrat_equal(lhs, middle) and mrat_equal(middle, rhs), k=k)
    logger.log_check("wk_identities", report.passed, g_max=g_max)
    return report
