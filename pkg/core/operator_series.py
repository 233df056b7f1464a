"""
Séries de operadores da troca x-y.

Monta, a partir de uma tabela de omega's, as séries truncadas em hbar e
polinomiais no parâmetro w:

* T_{m+1,n}(w): soma sobre k de hbar^{2(k-1)} w^k/k! com os operadores
  S(w hbar d) nas pernas e a restrição das pernas à variável distinguida;
* e^{w y} W^x_{m+1,n}(w) (forma simples) e e^{-u Theta} W^X_{m+1,n}(u)
  (forma padrão, com o prefator 1/(u S(u hbar)));
* os operadores L_r(v, theta) da forma padrão.

Layout dos resultados: bloco M em 1..m, variável distinguida z = m+1 e
bloco N em m+2..m+n+1. Tudo é normalizado por dx (ou dX) no bloco M e na
variável z, e por dy (ou dY) no bloco N.
"""
import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

from sympy import QQ
from sympy.polys.ring_series import rs_exp, rs_mul, rs_series_inversion, rs_trunc
from sympy.polys.rings import ring as poly_ring
from sympy.utilities.iterables import multiset_partitions

from config.settings import OperatorForm, Side
from core.errors import PreconditionError
from core.exact_algebra import (
    SYMBOLS,
    ZERO,
    HbarSeries,
    MRat,
    const,
    mrat_diff,
    rename,
    s_series,
)
from core.models import TableView, place
from core.spectral_curve import SpectralCurve
from core.term_executor import TermExecutor
from utils.logger import get_logger


logger = get_logger("operator_series")

PARAMS = ("w",)

# Anéis auxiliares: a = argumento de S, v = parâmetro de L, eps marca o grau em hbar^2
S_RING, S_A, S_V = poly_ring("a,v", QQ)
L_RING, L_EPS, L_V = poly_ring("eps,v", QQ)
V_RING, V = poly_ring("v", QQ)


# ---------------------------------------------------------------------------
# Forma dos operadores
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorFrame:
    """Diferenciais de normalização e derivações de uma forma numa curva"""
    curve: SpectralCurve
    form: OperatorForm = OperatorForm.SIMPLE

    @property
    def standard(self) -> bool:
        return self.form is OperatorForm.STANDARD

    def dx(self, var: int) -> MRat:
        """x' ou dX/dz = -x'/x"""
        d = self.curve.derivative(Side.X, var)
        return -d / self.curve.function(Side.X, var) if self.standard else d

    def dy(self, var: int) -> MRat:
        d = self.curve.derivative(Side.Y, var)
        return -d / self.curve.function(Side.Y, var) if self.standard else d

    def derive_x(self, f: MRat, var: int) -> MRat:
        return mrat_diff(f, var) / self.dx(var)

    def derive_y(self, f: MRat, var: int) -> MRat:
        return mrat_diff(f, var) / self.dy(var)

    def regularizer(self, a: int, b: int) -> MRat:
        """dx_a dx_b / (x_a - x_b)^2 dividido pelas diferenciais da forma"""
        xa, xb = self.curve.function(Side.X, a), self.curve.function(Side.X, b)
        pa, pb = self.curve.derivative(Side.X, a), self.curve.derivative(Side.X, b)
        return pa * pb / ((xa - xb) ** 2 * self.dx(a) * self.dx(b))

    def leading_exponent(self, var: int) -> MRat:
        """omega^(0)_{1,0}/dx = -y na forma simples, Theta = x y na padrão"""
        y = self.curve.function(Side.Y, var)
        return self.curve.function(Side.X, var) * y if self.standard else -y

    def theta(self, var: int) -> MRat:
        return self.curve.function(Side.X, var) * self.curve.function(Side.Y, var)


# ---------------------------------------------------------------------------
# Operadores S nas pernas
# ---------------------------------------------------------------------------

def s_operator_terms(f: MRat, legs: Sequence[int], max_total: int,
                     derivation: Callable[[MRat, int], MRat]) -> Dict[Tuple[int, ...], MRat]:
    """
    Termos de prod_l S(t_l d_l) aplicados a f, indexados pela tupla (j_l):
    o termo de índice j vale prod c_{2 j_l} d_l^{2 j_l} f e carrega t_l^{2 j_l}.
    Só entram tuplas com sum j_l <= max_total.
    """
    coeffs = s_series(2 * max(max_total, 0))
    out: Dict[Tuple[int, ...], MRat] = {}
    legs = list(legs)

    def walk(idx: int, current: MRat, js: Tuple[int, ...], remaining: int, weight):
        if idx == len(legs):
            if current:
                out[js] = current * const(weight)
            return
        leg = legs[idx]
        value = current
        for j in range(remaining + 1):
            if j:
                value = derivation(derivation(value, leg), leg)
            if not value:
                break
            walk(idx + 1, value, js + (j,), remaining - j, weight * coeffs.even(j))

    if f:
        walk(0, f, (), max_total, QQ.one)
    return out


def inverse_s_coefficients(order: int) -> List:
    """Coeficientes d_k de 1/S(a) = sum d_k a^k, k <= order"""
    s_poly = S_RING.zero
    for k, c in enumerate(s_series(order).coeffs):
        if c:
            s_poly += S_A**k * c
    inverse = rs_series_inversion(s_poly, S_A, order + 1)
    return [QQ.convert(inverse.coeff(S_A**k)) for k in range(order + 1)]


# ---------------------------------------------------------------------------
# Series T
# ---------------------------------------------------------------------------

def _leg_function(table: TableView, frame: OperatorFrame, g: int, a: int, k: int, b: int) -> MRat:
    """omega^(g)_{a+k,b} normalizado, com a correção regularizante em (0,0,2,0)"""
    body = table.get(g, a + k, b)
    for i in range(1, a + k + 1):
        body = body / frame.dx(i)
    for j in range(a + k + 1, a + k + b + 1):
        body = body / frame.dy(j)
    if (g, a, k, b) == (0, 0, 2, 0):
        body = body - frame.regularizer(1, 2)
    return body


def t_cal_term(table: TableView, m: int, n: int, k: int, cutoff: int,
               form: OperatorForm = OperatorForm.SIMPLE) -> HbarSeries:
    """
    k-ésima parcela de T_{m+1,n}(w), pernas restritas a z = m+1.

    No layout canônico da tabela as pernas ocupam m+1..m+k e o bloco N
    m+k+1..m+k+n; depois da restrição N volta para m+2..m+n+1.
    """
    if k < 1:
        raise PreconditionError("T-series summands start at k = 1", k=k)
    frame = OperatorFrame(table.curve, form)
    legs = list(range(m + 1, m + k + 1))
    restrict = {leg: m + 1 for leg in legs}
    restrict.update({m + k + t: m + 1 + t for t in range(1, n + 1)})
    scale = QQ(1, math.factorial(k))
    coeffs: Dict[Tuple[int, int], MRat] = {}
    base = 2 * (k - 1)
    for g in range(0, (cutoff - base) // 2 + 1):
        f = _leg_function(table, frame, g, m, k, n)
        budget = (cutoff - base - 2 * g) // 2
        for js, term in s_operator_terms(f, legs, budget, frame.derive_x).items():
            s = sum(js)
            key = (base + 2 * g + 2 * s, k + 2 * s)
            value = rename(term, restrict) * const(scale)
            coeffs[key] = coeffs.get(key, ZERO) + value
    return HbarSeries(cutoff, PARAMS, coeffs)


_cache_lock = threading.Lock()


def _series_cache(table: TableView) -> Dict[tuple, object]:
    """Memo de séries guardado na própria tabela (ou visão)"""
    cache = table.__dict__.get("_operator_series")
    if cache is None:
        with _cache_lock:
            cache = table.__dict__.setdefault("_operator_series", {})
    return cache


def _t_cal_cached(table: TableView, m: int, n: int, cutoff: int, form: OperatorForm) -> HbarSeries:
    cache = _series_cache(table)
    key = ("t", m, n, cutoff, form)
    cached = cache.get(key)
    if cached is not None:
        return cached
    total = HbarSeries(cutoff, PARAMS)
    for k in range(1, cutoff // 2 + 2):
        total = total + t_cal_term(table, m, n, k, cutoff, form)
    with _cache_lock:
        return cache.setdefault(key, total)


def t_cal(table: TableView, m: int, n: int, cutoff: int,
          form: OperatorForm = OperatorForm.SIMPLE, side: Side = Side.X) -> HbarSeries:
    """
    T_{m+1,n}(w) até hbar^cutoff.

    Para o lado y a conta é feita na visão trocada, com o resultado levado de
    volta ao layout (M, z, N) da tabela original.
    """
    if Side(side) is Side.Y:
        series = _t_cal_cached(table.swapped(), n, m, cutoff, OperatorForm(form))
        return series.map(lambda f: from_swapped_layout(f, m, n))
    return _t_cal_cached(table, m, n, cutoff, OperatorForm(form))


def from_swapped_layout(body: MRat, m: int, n: int) -> MRat:
    """(N, z, M) da visão trocada -> (M, z, N)"""
    mapping = {i: m + 1 + i for i in range(1, n + 1)}
    mapping[n + 1] = m + 1
    mapping.update({n + 1 + t: t for t in range(1, m + 1)})
    return rename(body, mapping)


def set_partitions(elements: Sequence[int]) -> List[List[List[int]]]:
    """Partições do conjunto em blocos não vazios, em ordem determinística"""
    elements = sorted(elements)
    if not elements:
        return [[]]
    return [sorted(sorted(block) for block in p) for p in multiset_partitions(elements)]


# ---------------------------------------------------------------------------
# Series W
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WPoly:
    """e^{w y} W^x_{m+1,n}(w) (ou e^{-u Theta} W^X) truncada em hbar^cutoff"""
    form: OperatorForm
    m: int
    n: int
    series: HbarSeries

    @property
    def cutoff(self) -> int:
        return self.series.cutoff

    def coefficient(self, hbar: int, power: int) -> MRat:
        return self.series.coeff((hbar, power))

    def at_hbar(self, hbar: int) -> Dict[int, MRat]:
        """{expoente de w: coeficiente} para hbar^hbar"""
        return {k[1]: c for k, c in self.series.coeffs.items() if k[0] == hbar}

    def equals(self, other: "WPoly") -> bool:
        return self.series.equals(other.series)


def _exponential_prefactor(table: TableView, cutoff: int, frame: OperatorFrame) -> HbarSeries:
    """(1/w) exp(T_{1,0} - w T0), com T0 = -y ou Theta; na forma padrão também 1/S(w hbar)"""
    t10 = t_cal(table, 0, 0, cutoff, frame.form)
    lead = HbarSeries.monomial(cutoff, PARAMS, (0, 1), frame.leading_exponent(1))
    exponent = t10 - lead
    if exponent.coeffs and exponent.min_hbar() < 1:
        raise PreconditionError("the hbar^0 part of T_{1,0} is not the leading term w*omega_{1,0}/dx")
    prefactor = exponent.exp() if exponent else HbarSeries.constant(cutoff, PARAMS)
    if frame.standard:
        inverse = inverse_s_coefficients(cutoff)
        correction = HbarSeries(cutoff, PARAMS, {
            (k, k): const(inverse[k]) for k in range(0, cutoff + 1, 2) if inverse[k]
        })
        prefactor = prefactor * correction
    return prefactor.shift((0, -1))


def _partition_product(table: TableView, m: int, n: int, cutoff: int, form: OperatorForm,
                       partition: List[List[int]]) -> HbarSeries:
    z = m + 1
    product = HbarSeries.constant(cutoff, PARAMS)
    for block in partition:
        I = [i for i in block if i < z]
        J = [j for j in block if j > z]
        slots = I + [z] + J
        block_series = t_cal(table, len(I), len(J), cutoff, form).map(lambda f: place(f, slots))
        product = product * block_series
    return product


def w_cal(table: TableView, m: int, n: int, cutoff: int,
          form: OperatorForm = OperatorForm.SIMPLE, side: Side = Side.X,
          executor: TermExecutor = None) -> WPoly:
    """
    e^{w y} W^x_{m+1,n}(w) em (M, z, N), até hbar^cutoff.

    É um polinômio em w para cada potência de hbar, exceto o termo 1/w de
    hbar^0 quando m + n = 0. No lado y devolve e^{w x} W^y_{m,n+1}(w).
    """
    form = OperatorForm(form)
    if Side(side) is Side.Y:
        dual = w_cal(table.swapped(), n, m, cutoff, form, Side.X, executor)
        return WPoly(form, m, n, dual.series.map(lambda f: from_swapped_layout(f, m, n)))
    cache = _series_cache(table)
    key = ("w", m, n, cutoff, form)
    cached = cache.get(key)
    if cached is not None:
        return cached
    SYMBOLS.check(m + n + 1)
    frame = OperatorFrame(table.curve, form)
    executor = executor or TermExecutor(1)
    elements = [i for i in range(1, m + n + 2) if i != m + 1]
    partitions = set_partitions(elements)
    prefactor = _exponential_prefactor(table, cutoff, frame)
    total = executor.reduce_sum(
        lambda p: _partition_product(table, m, n, cutoff, form, p),
        partitions, HbarSeries(cutoff, PARAMS), label=f"w_partitions_{m}_{n}",
    )
    result = WPoly(form, m, n, prefactor * total)
    logger.debug("w_series_built", m=m, n=n, cutoff=cutoff, form=form.value,
                 partitions=len(partitions), terms=len(result.series.coeffs))
    with _cache_lock:
        return cache.setdefault(key, result)


# ---------------------------------------------------------------------------
# Operadores L da forma padrão
# ---------------------------------------------------------------------------

def _v_poly(coeffs: Dict[int, object]):
    out = V_RING.zero
    for j, c in coeffs.items():
        if c:
            out += V**j * c
    return out


@dataclass(frozen=True)
class LOperatorSeries:
    """
    L_0(v, theta) = sum_g hbar^{2g} A_g(v) theta^{-2g}, com A_0 = 1.

    O expoente de L_0 é v sum_k hbar^{2k} q_k(v) d_theta^{2k} log theta, onde
    q_k = [a^{2k}] S(v a)/S(a) e d^{2k} log theta = -(2k-1)! theta^{-2k}.
    """
    genus: int
    a_polys: Tuple

    @classmethod
    def build(cls, genus: int) -> "LOperatorSeries":
        if genus < 0:
            raise PreconditionError("L-operator genus must be non-negative", genus=genus)
        order = 2 * genus
        s_coeffs = s_series(order).coeffs
        s_va = S_RING.zero
        s_a = S_RING.zero
        for k, c in enumerate(s_coeffs):
            if c:
                s_va += S_A**k * S_V**k * c
                s_a += S_A**k * c
        ratio = rs_mul(s_va, rs_series_inversion(s_a, S_A, order + 1), S_A, order + 1)
        exponent = L_RING.zero
        for (ia, iv), c in ratio.terms():
            if ia == 0 or ia % 2:
                continue
            k = ia // 2
            exponent += L_EPS**k * L_V**(iv + 1) * (-c * math.factorial(2 * k - 1))
        series = rs_exp(exponent, L_EPS, genus + 1) if exponent else L_RING.one
        series = rs_trunc(series, L_EPS, genus + 1)
        polys = []
        for g in range(genus + 1):
            polys.append(_v_poly({iv: c for (ie, iv), c in series.terms() if ie == g}))
        return cls(genus, tuple(polys))

    def a(self, g: int):
        """A_g(v) como polinômio de V_RING"""
        return self.a_polys[g]

    def lr(self, g: int, r: int) -> Tuple[Dict[int, object], int]:
        """
        Coeficiente de hbar^{2g} em L_r: (coeficientes em v, expoente de theta).

        (d_theta + v/theta) theta^p = (p + v) theta^{p-1}, logo
        L_r^{(g)} = A_g(v) prod_{i<r} (v - 2g - i) theta^{-2g-r}.
        """
        poly = self.a_polys[g]
        for i in range(r):
            poly = poly * (V - (2 * g + i))
        return coefficients_in_v(poly), -2 * g - r


def coefficients_in_v(poly) -> Dict[int, object]:
    return {monom[0]: c for monom, c in poly.terms() if c}


@lru_cache(maxsize=None)
def l_operator_series(genus: int) -> LOperatorSeries:
    return LOperatorSeries.build(genus)
