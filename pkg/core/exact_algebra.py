"""
Álgebra exata do motor.

Todas as funções racionais (MRat) vivem num único corpo de frações
Q(z1, ..., zN) do sympy; o último gerador é reservado como variável de série
(t = z - p) e nunca é entregue ao resto do código. Os coeficientes escalares são
elementos de QQ (racionais de precisão arbitrária).
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.fields import FracElement, field as frac_field
from sympy.polys.rings import PolyElement
from sympy.polys.ring_series import rs_subs, rs_trunc

from config.settings import EngineConfig
from core.errors import (
    AlgebraError,
    DiagonalPoleError,
    DivisionByZeroError,
    IrrationalPoleError,
    SymbolPoolExhaustedError,
    UnknownSymbolError,
    WindowError,
)


MRat = FracElement


class SymbolTable:
    """Conjunto fixo de geradores z1..zN, com índices a partir de 1"""

    def __init__(self, size: int):
        if size < 3:
            raise AlgebraError("symbol pool needs at least 3 generators", size=size)
        names = ",".join(f"z{i}" for i in range(1, size + 1))
        self.field, *gens = frac_field(names, QQ)
        self.ring = self.field.ring
        self.size = size
        self._gens = tuple(gens)

    @property
    def usable(self) -> int:
        """Quantidade de variáveis disponíveis para diferenciais"""
        return self.size - 1

    def check(self, i: int) -> int:
        if not isinstance(i, int) or not 1 <= i <= self.usable:
            raise UnknownSymbolError(f"unknown symbol index {i}", usable=self.usable)
        return i

    def index(self, i: int) -> int:
        """Índice 0-based do gerador z_i"""
        return self.check(i) - 1

    def gen(self, i: int) -> MRat:
        return self._gens[self.index(i)]

    def poly_gen(self, i: int) -> PolyElement:
        return self.ring.gens[self.index(i)]

    @property
    def scratch(self) -> PolyElement:
        return self.ring.gens[-1]

    @property
    def scratch_index(self) -> int:
        return self.size - 1

    def fresh(self, count: int, avoid: Iterable[int]) -> List[int]:
        """Devolve count índices livres, fora de avoid"""
        taken = set(avoid)
        free = [i for i in range(1, self.usable + 1) if i not in taken]
        if len(free) < count:
            raise SymbolPoolExhaustedError(
                f"need {count} fresh symbols, only {len(free)} left",
                pool=self.usable,
            )
        return free[:count]


SYMBOLS = SymbolTable(EngineConfig.MAX_SYMBOLS)
FIELD = SYMBOLS.field
RING = SYMBOLS.ring


# ---------------------------------------------------------------------------
# Escalares e construção
# ---------------------------------------------------------------------------

def parse_rational(text: Any):
    """Converte "p/q", "p", int ou um racional do sympy num elemento de QQ"""
    if isinstance(text, float):
        raise AlgebraError(f"not an exact rational: {text!r}")
    if isinstance(text, int):
        return QQ(text)
    if not isinstance(text, str):
        return QQ.convert(text)
    raw = str(text).strip()
    try:
        if "/" in raw:
            p, q = raw.split("/", 1)
            p, q = int(p), int(q)
        else:
            p, q = int(raw), 1
    except ValueError:
        raise AlgebraError(f"not an exact rational: {text!r}")
    if q == 0:
        raise DivisionByZeroError(f"zero denominator in {text!r}")
    return QQ(p, q)


def format_rational(q) -> str:
    q = QQ.convert(q)
    p, d = QQ.numer(q), QQ.denom(q)
    return f"{p}" if d == 1 else f"{p}/{d}"


def to_mrat(value: Any) -> MRat:
    """Promove int, QQ ou PolyElement para o corpo"""
    if isinstance(value, FracElement):
        return value
    if isinstance(value, PolyElement):
        return FIELD.new(value)
    return FIELD(QQ.convert(value))


def const(value: Any) -> MRat:
    return FIELD(QQ.convert(value))


ZERO = FIELD.zero
ONE = FIELD.one


def is_constant(f: MRat) -> bool:
    return f.numer.is_ground and f.denom.is_ground


def to_rational(f: MRat):
    """Valor racional de uma constante do corpo"""
    if not is_constant(f):
        raise AlgebraError(f"expected a constant, got {f}")
    if not f:
        return QQ.zero
    return QQ.convert(f.numer.LC) / QQ.convert(f.denom.LC)


def from_coefficients(num: Sequence[Any], den: Sequence[Any] = (1,), var: int = 1) -> MRat:
    """Função racional em z_var a partir de listas ascendentes de coeficientes"""
    z = SYMBOLS.poly_gen(var)
    numer = RING.zero
    for k, c in enumerate(num):
        numer += parse_rational(c) * z**k
    denom = RING.zero
    for k, c in enumerate(den):
        denom += parse_rational(c) * z**k
    if not denom:
        raise DivisionByZeroError("denominator coefficient list is identically zero")
    return FIELD.new(numer, denom)


def coefficients(poly: PolyElement, var: int = 1) -> List[Any]:
    """Coeficientes ascendentes de um polinômio univariado em z_var"""
    if not poly:
        return [QQ.zero]
    i = SYMBOLS.index(var)
    deg = poly.degree(i)
    out = []
    for k in range(deg + 1):
        c = poly.coeff_wrt(i, k)
        if not c.is_ground:
            raise AlgebraError(f"polynomial is not univariate in z{var}")
        out.append(QQ.convert(c.const()))
    return out


def poly_value(poly: PolyElement, p: Any, var: int = 1):
    """Valor de um polinômio univariado em z_var = p (Horner)"""
    p = QQ.convert(p)
    acc = QQ.zero
    for c in reversed(coefficients(poly, var)):
        acc = acc * p + c
    return acc


def variables(f: MRat) -> List[int]:
    """Índices (1-based) das variáveis que aparecem em f"""
    used = set()
    for poly in (f.numer, f.denom):
        for monom in poly.itermonoms():
            used.update(i + 1 for i, e in enumerate(monom) if e)
    return sorted(used)


# ---------------------------------------------------------------------------
# Operações básicas
# ---------------------------------------------------------------------------

class ArithOp(str, Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"


def mrat_arith(a: Any, b: Any, op: ArithOp) -> MRat:
    """Aritmética exata; o corpo sempre devolve a forma reduzida"""
    a, b = to_mrat(a), to_mrat(b)
    op = ArithOp(op)
    if op is ArithOp.ADD:
        return a + b
    if op is ArithOp.SUB:
        return a - b
    if op is ArithOp.MUL:
        return a * b
    if not b:
        raise DivisionByZeroError("division by the zero rational function")
    return a / b


def mrat_inverse(f: MRat) -> MRat:
    if not f:
        raise DivisionByZeroError("inverse of zero")
    return FIELD.new(f.denom, f.numer)


def mrat_diff(f: MRat, var: int) -> MRat:
    return to_mrat(f).diff(SYMBOLS.gen(var))


def mrat_equal(a: Any, b: Any) -> bool:
    """Teste de zero por multiplicação cruzada"""
    a, b = to_mrat(a), to_mrat(b)
    return not (a.numer * b.denom - b.numer * a.denom)


def _canonical(numer: PolyElement, denom: PolyElement, reduced: bool) -> MRat:
    if not reduced:
        return FIELD.new(numer, denom)
    if QQ.convert(denom.LC) < 0:
        numer, denom = -numer, -denom
    return FIELD.raw_new(numer, denom)


def _remap(poly: PolyElement, moves: Dict[int, int]) -> PolyElement:
    acc: Dict[Tuple[int, ...], Any] = {}
    for monom, coeff in poly.iterterms():
        new = list(monom)
        for src in moves:
            new[src] = 0
        for src, dst in moves.items():
            new[dst] += monom[src]
        key = tuple(new)
        acc[key] = acc.get(key, QQ.zero) + coeff
    return RING.from_dict({k: v for k, v in acc.items() if v})


def rename(f: MRat, mapping: Dict[int, int]) -> MRat:
    """Substituição simultânea z_i -> z_j (mapa de monômios)"""
    moves = {SYMBOLS.index(s): SYMBOLS.index(t) for s, t in mapping.items() if s != t}
    if not moves:
        return f
    denom = _remap(f.denom, moves)
    if not denom:
        pairs = ", ".join(f"z{s}->z{t}" for s, t in sorted(mapping.items()))
        raise DiagonalPoleError(f"denominator vanishes identically under {pairs}", binding=pairs)
    numer = _remap(f.numer, moves)
    used = set(variables(f))
    targets = [mapping[s] for s in mapping if s != mapping[s] and s in used]
    untouched = used - set(s for s in mapping if s != mapping[s])
    injective = len(targets) == len(set(targets)) and not (set(targets) & untouched)
    return _canonical(numer, denom, reduced=injective)


def generator_index(value: MRat) -> Optional[int]:
    """i se value é exatamente z_i, senão None"""
    if value.denom != RING.one or not value.numer.is_generator:
        return None
    monom = next(iter(value.numer.itermonoms()))
    return monom.index(1) + 1


def substitute(f: MRat, bindings: Dict[int, Any]) -> MRat:
    """
    Substituição simultânea de variáveis por funções racionais.

    Os polinômios são homogeneizados pelos denominadores dos valores, de modo
    que numerador e denominador são compostos termo a termo sem frações.
    """
    if not bindings:
        return f
    values = {v: to_mrat(b) for v, b in bindings.items()}
    renames = {v: generator_index(b) for v, b in values.items()}
    if all(t is not None for t in renames.values()):
        return rename(f, renames)

    targets = {SYMBOLS.index(v): b for v, b in values.items()}
    degrees = {i: max(f.numer.degree(i), f.denom.degree(i), 0) for i in targets}
    cache: Dict[Tuple[int, int, int], PolyElement] = {}

    def power(i: int, which: int, k: int) -> PolyElement:
        key = (i, which, k)
        if key not in cache:
            base = targets[i].numer if which == 0 else targets[i].denom
            cache[key] = base**k
        return cache[key]

    def compose(poly: PolyElement) -> PolyElement:
        out = RING.zero
        for monom, coeff in poly.iterterms():
            rest = list(monom)
            term = RING.one
            for i in targets:
                a = monom[i]
                rest[i] = 0
                term = term * power(i, 0, a) * power(i, 1, degrees[i] - a)
            out += term.mul_term((tuple(rest), coeff))
        return out

    denom = compose(f.denom)
    if not denom:
        pairs = ", ".join(f"z{v}->{b}" for v, b in sorted(values.items()))
        raise DiagonalPoleError(f"denominator vanishes identically under {pairs}", binding=pairs)
    return FIELD.new(compose(f.numer), denom)


def restrict_diagonal(f: MRat, source: int, target: int) -> MRat:
    """Restrição z_source -> z_target; falha se houver polo na diagonal"""
    return rename(f, {source: target})


def diagonal_valuation(f: MRat, i: int, j: int) -> float:
    """Valuação de f em T quando z_j = z_i + T (inf para f = 0)"""
    if not f:
        return math.inf
    T = SYMBOLS.scratch
    gi, gj = SYMBOLS.poly_gen(i), SYMBOLS.poly_gen(j)
    t = SYMBOLS.scratch_index
    numer = f.numer.compose(gj, gi + T)
    denom = f.denom.compose(gj, gi + T)
    return numer.tail_degree(t) - denom.tail_degree(t)


def evaluate_at(f: MRat, point: Dict[int, Any]) -> MRat:
    """Avalia variáveis em racionais (sondas)"""
    return substitute(f, {v: const(c) for v, c in point.items()})


# ---------------------------------------------------------------------------
# Séries de Laurent com janela explícita
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentData:
    """Coeficientes de t^min_order .. t^max_order, t = z - point"""
    point: Any
    min_order: int
    coeffs: Tuple[MRat, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise WindowError("empty Laurent window", point=self.point, min_order=self.min_order)

    @property
    def max_order(self) -> int:
        return self.min_order + len(self.coeffs) - 1

    def coefficient(self, k: int) -> MRat:
        if k < self.min_order:
            return ZERO
        if k > self.max_order:
            raise WindowError(
                f"order {k} outside known window [{self.min_order}, {self.max_order}]",
                point=self.point,
            )
        return self.coeffs[k - self.min_order]

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c:
                return self.min_order + k
        return self.max_order + 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def residue(self) -> MRat:
        return self.coefficient(-1)

    def window(self, lo: int, hi: int) -> "LaurentData":
        if lo > hi:
            raise WindowError(f"inverted window [{lo}, {hi}]")
        return LaurentData(self.point, lo, tuple(self.coefficient(k) for k in range(lo, hi + 1)))

    def _combine(self, other: "LaurentData", sign: int) -> "LaurentData":
        lo = min(self.min_order, other.min_order)
        hi = min(self.max_order, other.max_order)
        if hi < lo:
            raise WindowError("sum has no known coefficients", point=self.point)
        coeffs = tuple(
            self.coefficient(k) + other.coefficient(k) if sign > 0
            else self.coefficient(k) - other.coefficient(k)
            for k in range(lo, hi + 1)
        )
        return LaurentData(self.point, lo, coeffs)

    def __add__(self, other: "LaurentData") -> "LaurentData":
        return self._combine(other, 1)

    def __sub__(self, other: "LaurentData") -> "LaurentData":
        return self._combine(other, -1)

    def __mul__(self, other: "LaurentData") -> "LaurentData":
        va, vb = self.valuation(), other.valuation()
        hi = min(va + other.max_order, vb + self.max_order)
        lo = va + vb
        if hi < lo:
            lo = hi
        coeffs = []
        for k in range(lo, hi + 1):
            acc = ZERO
            for i in range(va, k - vb + 1):
                a = self.coefficient(i)
                if a:
                    b = other.coefficient(k - i)
                    if b:
                        acc += a * b
            coeffs.append(acc)
        return LaurentData(self.point, lo, tuple(coeffs))

    def scale(self, c: Any) -> "LaurentData":
        c = to_mrat(c)
        return LaurentData(self.point, self.min_order, tuple(c * a for a in self.coeffs))

    def inverse(self) -> "LaurentData":
        v = self.valuation()
        if v > self.max_order:
            raise WindowError("leading coefficient outside known window", point=self.point)
        lead_inv = mrat_inverse(self.coefficient(v))
        count = self.max_order - v + 1
        h: List[MRat] = []
        for k in range(count):
            acc = ONE if k == 0 else ZERO
            for j in range(1, k + 1):
                a = self.coefficient(v + j)
                if a:
                    acc -= a * h[k - j]
            h.append(acc * lead_inv)
        return LaurentData(self.point, -v, tuple(h))

    def deriv(self) -> "LaurentData":
        coeffs = tuple(const(k) * self.coefficient(k) for k in range(self.min_order, self.max_order + 1))
        return LaurentData(self.point, self.min_order - 1, coeffs)

    def rationals(self) -> List[Any]:
        return [to_rational(c) for c in self.coeffs]


def laurent_from_poly(poly: PolyElement, point: Any, prec: int) -> LaurentData:
    """Série exata a partir de um polinômio na variável de série"""
    t = SYMBOLS.scratch_index
    coeffs = tuple(FIELD.new(poly.coeff_wrt(t, k)) for k in range(prec))
    return LaurentData(point, 0, coeffs)


def expand_rational(f: MRat, replacements: Dict[int, PolyElement], prec: int,
                    point: Any = None) -> LaurentData:
    """
    Expande f em t substituindo z_i -> replacements[i] (polinômios em t,
    conhecidos módulo t^prec).

    Com numerador e denominador conhecidos até t^(prec-1) e denominador de
    valuação v, o quociente fica determinado até t^(prec-1-2v).
    """
    T = SYMBOLS.scratch
    t = SYMBOLS.scratch_index
    rules = {SYMBOLS.poly_gen(i): r for i, r in replacements.items()}
    if rules:
        numer = rs_subs(f.numer, rules, T, prec)
        denom = rs_subs(f.denom, rules, T, prec)
    else:
        numer = rs_trunc(f.numer, T, prec)
        denom = rs_trunc(f.denom, T, prec)
    if not denom:
        raise WindowError("denominator vanishes to the requested precision", prec=prec)
    v = denom.tail_degree(t)
    count = prec - v
    lead_inv = FIELD.new(RING.one, denom.coeff_wrt(t, v))
    dcoeffs = [denom.coeff_wrt(t, v + j) for j in range(count)]
    h: List[MRat] = []
    for k in range(count):
        acc = FIELD.new(numer.coeff_wrt(t, k))
        for j in range(1, k + 1):
            if dcoeffs[j]:
                acc -= h[k - j] * dcoeffs[j]
        h.append(acc * lead_inv)
    return LaurentData(point, -v, tuple(h))


def taylor_at(f: MRat, p: Any, window: Tuple[int, int], var: int = 1) -> LaurentData:
    """Coeficientes de Laurent de f em z_var = p na janela [lo, hi]"""
    lo, hi = window
    if lo > hi:
        raise WindowError(f"inverted window [{lo}, {hi}]")
    f = to_mrat(f)
    p = QQ.convert(p)
    T = SYMBOLS.scratch
    i = SYMBOLS.index(var)
    v_bound = max(f.denom.degree(i), 0)
    prec = max(1, hi + 1 + 2 * v_bound)
    series = expand_rational(f, {var: RING.ground_new(p) + T}, prec, point=p)
    for k in range(series.min_order, min(lo, series.max_order + 1)):
        if series.coefficient(k):
            raise WindowError(
                f"nonzero coefficient at order {k} below window start {lo}",
                point=p,
            )
    return series.window(lo, hi)


# ---------------------------------------------------------------------------
# Frações parciais
# ---------------------------------------------------------------------------

@dataclass
class PrincipalParts:
    """Partes principais em z_var; as posições podem depender de outras variáveis"""
    var: int
    parts: Dict[MRat, Tuple[MRat, ...]] = field(default_factory=dict)

    def term(self, location: MRat) -> MRat:
        z = SYMBOLS.gen(self.var)
        total = ZERO
        for j, c in enumerate(self.parts[location], start=1):
            if c:
                total += c / (z - location) ** j
        return total

    def total(self) -> MRat:
        out = ZERO
        for loc in self.parts:
            out += self.term(loc)
        return out


def pole_locations(f: MRat, var: int) -> Dict[MRat, int]:
    """Posições (polinomiais nas outras variáveis) e ordens dos polos em z_var"""
    i = SYMBOLS.index(var)
    out: Dict[MRat, int] = {}
    if f.denom.degree(i) <= 0:
        return out
    _, factors = f.denom.factor_list()
    for fac, mult in factors:
        d = fac.degree(i)
        if d <= 0:
            continue
        if d >= 2:
            raise IrrationalPoleError(
                f"denominator factor {fac.as_expr()} has no rational root in z{var}",
                factor=str(fac.as_expr()),
            )
        a = fac.coeff_wrt(i, 1)
        b = fac.coeff_wrt(i, 0)
        if not a.is_ground:
            raise IrrationalPoleError(
                f"pole of {fac.as_expr()} is not polynomial in the other variables",
                factor=str(fac.as_expr()),
            )
        loc = FIELD.new(b.mul_ground(-QQ.one / QQ.convert(a.LC)))
        out[loc] = out.get(loc, 0) + mult
    return out


def location_poly(loc: MRat) -> PolyElement:
    """Posição de polo como polinômio (o denominador de loc é constante)"""
    if not loc.denom.is_ground:
        raise AlgebraError(f"pole location {loc} is not polynomial")
    return loc.numer.mul_ground(QQ.one / QQ.convert(loc.denom.LC))


def principal_parts(f: MRat, var: int) -> PrincipalParts:
    T = SYMBOLS.scratch
    result = PrincipalParts(var=var)
    for loc, order in pole_locations(f, var).items():
        series = expand_rational(f, {var: location_poly(loc) + T}, max(1, 2 * order), point=loc)
        result.parts[loc] = tuple(series.coefficient(-j) for j in range(1, order + 1))
    return result


@dataclass
class PartialFractions:
    """f = poly_part + soma de c[p][k-1]/(z-p)^k"""
    var: int
    poly_part: MRat
    parts: Dict[Any, Tuple[Any, ...]]

    def reassemble(self) -> MRat:
        z = SYMBOLS.gen(self.var)
        total = self.poly_part
        for p, cs in self.parts.items():
            for k, c in enumerate(cs, start=1):
                if c:
                    total += const(c) / (z - const(p)) ** k
        return total


def partial_fractions(f: MRat, var: int = 1) -> PartialFractions:
    f = to_mrat(f)
    if any(v != var for v in variables(f)):
        raise AlgebraError(f"partial_fractions expects a function of z{var} only")
    if not f:
        return PartialFractions(var=var, poly_part=ZERO, parts={})
    quotients, _ = f.numer.div([f.denom])
    poly_part = FIELD.new(quotients[0])
    pp = principal_parts(f, var)
    parts = {}
    for loc in sorted(pp.parts, key=to_rational):
        parts[to_rational(loc)] = tuple(to_rational(c) for c in pp.parts[loc])
    return PartialFractions(var=var, poly_part=poly_part, parts=parts)


def residues(f: MRat, var: int = 1) -> Dict[Any, Any]:
    """Resíduos de f dz nos polos finitos (racionais)"""
    pp = principal_parts(to_mrat(f), var)
    return {to_rational(loc): to_rational(cs[0]) for loc, cs in pp.parts.items()}


# ---------------------------------------------------------------------------
# Séries truncadas em hbar (com parâmetros w)
# ---------------------------------------------------------------------------

Key = Tuple[int, ...]


class HbarSeries:
    """
    Série truncada em hbar com coeficientes MRat e parâmetros polinomiais.

    As chaves são (expoente de hbar, expoentes dos parâmetros...). Termos
    com expoente de hbar acima de cutoff são descartados em toda operação.
    """

    __slots__ = ("cutoff", "params", "coeffs")

    def __init__(self, cutoff: int, params: Sequence[str] = (), coeffs: Optional[Dict[Key, MRat]] = None):
        self.cutoff = cutoff
        self.params = tuple(params)
        self.coeffs: Dict[Key, MRat] = {}
        for key, c in (coeffs or {}).items():
            if len(key) != len(self.params) + 1:
                raise AlgebraError(f"key {key} does not match params {self.params}")
            if key[0] <= cutoff and c:
                self.coeffs[key] = c

    @classmethod
    def monomial(cls, cutoff: int, params: Sequence[str], key: Key, coeff: Any) -> "HbarSeries":
        return cls(cutoff, params, {tuple(key): to_mrat(coeff)})

    @classmethod
    def constant(cls, cutoff: int, params: Sequence[str], coeff: Any = 1) -> "HbarSeries":
        return cls.monomial(cutoff, params, (0,) * (len(tuple(params)) + 1), coeff)

    def _like(self, coeffs: Dict[Key, MRat]) -> "HbarSeries":
        return HbarSeries(self.cutoff, self.params, coeffs)

    def _check(self, other: "HbarSeries"):
        if self.params != other.params:
            raise AlgebraError(f"parameter mismatch {self.params} vs {other.params}")

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: "HbarSeries") -> "HbarSeries":
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, ZERO) + c
        return HbarSeries(min(self.cutoff, other.cutoff), self.params, out)

    def __neg__(self) -> "HbarSeries":
        return self._like({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "HbarSeries") -> "HbarSeries":
        return self + (-other)

    def __mul__(self, other: "HbarSeries") -> "HbarSeries":
        self._check(other)
        cutoff = min(self.cutoff, other.cutoff)
        out: Dict[Key, MRat] = {}
        for ka, a in self.coeffs.items():
            for kb, b in other.coeffs.items():
                if ka[0] + kb[0] > cutoff:
                    continue
                key = tuple(x + y for x, y in zip(ka, kb))
                out[key] = out.get(key, ZERO) + a * b
        return HbarSeries(cutoff, self.params, out)

    def scale(self, c: Any) -> "HbarSeries":
        c = to_mrat(c)
        return self._like({k: c * v for k, v in self.coeffs.items()})

    def map(self, fn: Callable[[MRat], MRat]) -> "HbarSeries":
        return self._like({k: fn(v) for k, v in self.coeffs.items()})

    def shift(self, key: Key) -> "HbarSeries":
        """Multiplica por hbar^key[0] * prod(param^key[i])"""
        return self._like({tuple(a + b for a, b in zip(k, key)): v for k, v in self.coeffs.items()})

    def coeff(self, key: Key) -> MRat:
        return self.coeffs.get(tuple(key), ZERO)

    def min_hbar(self) -> float:
        return min((k[0] for k in self.coeffs), default=math.inf)

    def hbar_part(self, h: int) -> "HbarSeries":
        return self._like({k: v for k, v in self.coeffs.items() if k[0] == h})

    def degree(self, param: str) -> int:
        i = self.params.index(param) + 1
        return max((k[i] for k in self.coeffs), default=-1)

    def extract(self, param: str, power: int) -> "HbarSeries":
        """Coeficiente de param^power, como série sem esse parâmetro"""
        i = self.params.index(param) + 1
        params = self.params[:i - 1] + self.params[i:]
        out = {k[:i] + k[i + 1:]: v for k, v in self.coeffs.items() if k[i] == power}
        return HbarSeries(self.cutoff, params, out)

    def with_cutoff(self, cutoff: int) -> "HbarSeries":
        return HbarSeries(cutoff, self.params, self.coeffs)

    def is_even(self) -> bool:
        return all(k[0] % 2 == 0 for k in self.coeffs)

    def exp(self) -> "HbarSeries":
        """exp de uma série nilpotente (todo termo com hbar >= 1)"""
        if self.min_hbar() < 1:
            raise AlgebraError("exp needs every term to carry a positive power of hbar")
        result = HbarSeries.constant(self.cutoff, self.params)
        power = HbarSeries.constant(self.cutoff, self.params)
        k = 0
        while True:
            k += 1
            power = power * self
            if not power:
                break
            result = result + power.scale(QQ(1, math.factorial(k)))
        return result

    def equals(self, other: "HbarSeries") -> bool:
        self._check(other)
        for key in set(self.coeffs) | set(other.coeffs):
            if not mrat_equal(self.coeff(key), other.coeff(key)):
                return False
        return True

    def first_difference(self, other: "HbarSeries") -> Optional[Key]:
        for key in sorted(set(self.coeffs) | set(other.coeffs)):
            if not mrat_equal(self.coeff(key), other.coeff(key)):
                return key
        return None

    def __repr__(self) -> str:
        return f"HbarSeries(cutoff={self.cutoff}, params={self.params}, terms={len(self.coeffs)})"


# ---------------------------------------------------------------------------
# S(z) = (e^{z/2} - e^{-z/2}) / z
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SFunctionSeries:
    order: int
    coeffs: Tuple[Any, ...]

    def even(self, k: int):
        """Coeficiente c_{2k}"""
        return self.coeffs[2 * k] if 2 * k <= self.order else s_coefficient(2 * k)


def s_coefficient(n: int):
    if n % 2:
        return QQ.zero
    k = n // 2
    return QQ(1, 4**k * math.factorial(2 * k + 1))


def s_series(order: int) -> SFunctionSeries:
    if order < 0:
        raise AlgebraError("S-series order must be non-negative", order=order)
    return SFunctionSeries(order=order, coeffs=tuple(s_coefficient(n) for n in range(order + 1)))
