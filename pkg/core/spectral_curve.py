"""
Curva espectral racional de gênero zero.

Guarda x(z), y(z) como funções racionais em z1, valida as hipóteses da
recursão (zeros simples e racionais de dx, y regular e dy != 0 neles) e
mantém as séries de deck de cada ponto de ramificação com alargamento
automático da ordem.
"""
import threading
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.rings import ring as poly_ring
from sympy.polys.ring_series import rs_mul, rs_nth_root, rs_series_reversion, rs_subs, rs_trunc

from config.settings import EngineConfig, Side
from core.errors import (
    CoincidentZerosError,
    CurveValidationError,
    DeckSeriesError,
    IrrationalRamificationError,
    NonSimpleRamificationError,
    PrecisionCapExceededError,
    SingularCurveError,
)
from core.exact_algebra import (
    RING,
    SYMBOLS,
    MRat,
    const,
    format_rational,
    from_coefficients,
    mrat_diff,
    poly_value,
    rename,
    taylor_at,
    to_mrat,
    variables,
)
from utils.logger import logger


# Anel auxiliar das séries de deck: t = z - p, s = variável da reversão
DECK_RING, DECK_T, DECK_S = poly_ring("t,s", QQ)


@dataclass(frozen=True)
class CurveSpec:
    """Dados (x, y) de uma curva espectral em gênero zero"""
    name: str
    x: MRat
    y: MRat

    @classmethod
    def from_coefficients(cls, name: str, x_num: Sequence[Any], x_den: Sequence[Any],
                          y_num: Sequence[Any], y_den: Sequence[Any]) -> "CurveSpec":
        return cls(name, from_coefficients(x_num, x_den), from_coefficients(y_num, y_den))

    def function(self, side: Side) -> MRat:
        return self.x if Side(side) is Side.X else self.y

    def swapped(self) -> "CurveSpec":
        """Curva (y, x)"""
        return CurveSpec(f"{self.name}-swapped", self.y, self.x)

    def shifted(self, c: Any) -> "CurveSpec":
        """Curva (x + c, y)"""
        return CurveSpec(f"{self.name}-shift", self.x + const(c), self.y)


@dataclass(frozen=True)
class RamificationPoint:
    """
    Zero simples de dx (ou dy) com a série de deck
    sigma(p + t) = p + sum_k deck[k-1] t^k, conhecida até t^order.
    """
    location: Any
    side: Side
    deck: Tuple[Any, ...]
    order: int

    def deck_poly(self):
        """sigma(p+t) - p como polinômio na variável de série do corpo"""
        T = SYMBOLS.scratch
        out = RING.zero
        for k, c in enumerate(self.deck, start=1):
            if c:
                out += T**k * c
        return out

    def sigma_point(self):
        """sigma(p+t) como polinômio em t"""
        return RING.ground_new(QQ.convert(self.location)) + self.deck_poly()

    def point(self):
        """p + t"""
        return RING.ground_new(QQ.convert(self.location)) + SYMBOLS.scratch

    def sigma_derivative(self):
        """sigma'(t), conhecido até t^(order-1)"""
        return self.deck_poly().diff(SYMBOLS.scratch)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "location": format_rational(self.location),
            "side": self.side.value,
            "order": self.order,
            "deck": [format_rational(c) for c in self.deck],
        }


def _check_univariate(curve: CurveSpec):
    for label, f in (("x", curve.x), ("y", curve.y)):
        if any(v != 1 for v in variables(f)):
            raise CurveValidationError(f"{label} must be a rational function of z only",
                                       hypothesis="global coordinate z")
        if not variables(f):
            raise SingularCurveError(f"{label} is constant", hypothesis="x and y nonconstant")


def critical_points(f: MRat, label: str = "x") -> List[Any]:
    """Zeros racionais e simples de f'(z) em C; falha fora dessas hipóteses"""
    deriv = mrat_diff(f, 1)
    if not deriv:
        raise SingularCurveError(f"d{label} vanishes identically", hypothesis=f"{label} nonconstant")
    numer, denom = deriv.numer, deriv.denom
    # comportamento em z = infinito: f' ~ z^d, e d(f) tem zero em infinito se d <= -3
    d = numer.degree(0) - denom.degree(0)
    if d == -3:
        raise IrrationalRamificationError(
            f"d{label} vanishes at z = infinity; reparametrize the curve by z -> 1/z",
            hypothesis=f"rational finite critical points of {label}",
        )
    if d < -3:
        raise NonSimpleRamificationError(
            f"d{label} has a zero of order {-d - 2} at z = infinity",
            hypothesis=f"all critical points of {label} are simple",
        )
    points = []
    _, factors = numer.factor_list()
    for fac, mult in factors:
        deg = fac.degree(0)
        if deg <= 0:
            continue
        if deg >= 2:
            raise IrrationalRamificationError(
                f"d{label} has critical points at the roots of {fac.as_expr()}; "
                "only rational ramification points are supported, reparametrize the curve",
                hypothesis=f"rational critical points of {label}",
            )
        if mult > 1:
            raise NonSimpleRamificationError(
                f"d{label} has a zero of order {mult} at the root of {fac.as_expr()}",
                hypothesis=f"all critical points of {label} are simple",
            )
        a = QQ.convert(fac.coeff_wrt(0, 1).LC)
        b = QQ.convert(fac.coeff_wrt(0, 0).const())
        points.append(-b / a)
    return sorted(points)


def validate_curve(curve: CurveSpec, sides: Sequence[Side] = (Side.X,)) -> Dict[Side, List[Any]]:
    """
    Verifica as hipóteses da recursão para cada lado pedido e devolve as
    posições dos pontos de ramificação.
    """
    _check_univariate(curve)
    found: Dict[Side, List[Any]] = {}
    for side in sides:
        side = Side(side)
        f, other = (curve.x, curve.y) if side is Side.X else (curve.y, curve.x)
        label, other_label = ("x", "y") if side is Side.X else ("y", "x")
        points = critical_points(f, label)
        other_deriv = mrat_diff(other, 1)
        for p in points:
            if not poly_value(other.denom, p):
                raise SingularCurveError(
                    f"{other_label} has a pole at the ramification point z = {format_rational(p)}",
                    hypothesis=f"{other_label} regular at the zeros of d{label}",
                )
            if not poly_value(other_deriv.numer, p):
                raise CoincidentZerosError(
                    f"d{label} and d{other_label} both vanish at z = {format_rational(p)}",
                    hypothesis=f"zeros of dx and dy are simple and pairwise distinct",
                )
        found[side] = points
    return found


def deck_series(location: Any, f: MRat, order: int, side: Side = Side.X) -> RamificationPoint:
    """
    Involução local sigma com f(sigma(z)) = f(z) perto de um zero simples de f'.

    Escreve f(p+t) - f(p) = a2 * phi(t)^2 com phi = t + O(t^2); então
    sigma = phi^{-1}(-phi(t)). A reversão e a raiz quadrada vêm do
    ring_series do sympy.
    """
    if order < 2:
        raise DeckSeriesError("deck series order must be at least 2", order=order)
    p = QQ.convert(location)
    taylor = taylor_at(f, p, (0, order + 1)).rationals()
    if taylor[1]:
        raise DeckSeriesError(f"z = {format_rational(p)} is not a critical point", point=p)
    a2 = taylor[2]
    if not a2:
        raise DeckSeriesError(f"critical point z = {format_rational(p)} is not simple", point=p)
    t, s = DECK_T, DECK_S
    normalized = DECK_RING.zero
    for k in range(order):
        c = taylor[k + 2] / a2
        if c:
            normalized += t**k * c
    root = rs_nth_root(normalized, 2, t, order)
    phi = rs_trunc(t * root, t, order + 1)
    inverse = rs_series_reversion(phi, t, order + 1, s)
    sigma = rs_subs(inverse, {s: -phi}, t, order + 1)

    twice = rs_subs(sigma, {t: sigma}, t, order + 1)
    if twice != t:
        raise DeckSeriesError("deck series is not an involution", point=p, order=order)
    shifted = DECK_RING.zero
    base = DECK_RING.zero
    power = sigma
    for k in range(2, order + 2):
        power = rs_mul(power, sigma, t, order + 1)
        if taylor[k]:
            shifted += power * taylor[k]
            base += t**k * taylor[k]
    if rs_trunc(shifted - base, t, order + 1):
        raise DeckSeriesError("deck series does not preserve the function", point=p, order=order)

    coeffs = tuple(QQ.convert(sigma.coeff(t**k)) for k in range(1, order + 1))
    if coeffs[0] != -1:
        raise DeckSeriesError("deck series has wrong linear term", point=p, linear=coeffs[0])
    return RamificationPoint(location=p, side=Side(side), deck=coeffs, order=order)


class SpectralCurve:
    """
    Curva validada com cache de séries de deck.

    O cache é lido sem trava e preenchido sob trava; a ordem é dobrada até
    atingir a pedida, com teto em EngineConfig.DECK_ORDER_CAP.
    """

    def __init__(self, spec: CurveSpec, sides: Sequence[Side] = (Side.X,)):
        self.spec = spec
        self._locations: Dict[Side, List[Any]] = validate_curve(spec, sides)
        self._deck: Dict[Tuple[Side, Any], RamificationPoint] = {}
        self._lock = threading.Lock()
        self._derivs = {Side.X: mrat_diff(spec.x, 1), Side.Y: mrat_diff(spec.y, 1)}
        self._swapped: Optional["SpectralCurve"] = None
        logger.debug("curve_validated", curve=spec.name,
                     sides=[Side(s).value for s in sides],
                     ramification={s.value: [format_rational(p) for p in pts]
                                   for s, pts in self._locations.items()})

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def x(self) -> MRat:
        return self.spec.x

    @property
    def y(self) -> MRat:
        return self.spec.y

    def function(self, side: Side, var: int = 1) -> MRat:
        f = self.spec.function(side)
        return f if var == 1 else rename(f, {1: var})

    def derivative(self, side: Side, var: int = 1) -> MRat:
        f = self._derivs[Side(side)]
        return f if var == 1 else rename(f, {1: var})

    def ensure_side(self, side: Side) -> List[Any]:
        side = Side(side)
        if side not in self._locations:
            found = validate_curve(self.spec, (side,))
            with self._lock:
                self._locations.update(found)
        return self._locations[side]

    def locations(self, side: Side = Side.X) -> List[Any]:
        return list(self.ensure_side(side))

    def deck(self, location: Any, side: Side = Side.X, order: Optional[int] = None) -> RamificationPoint:
        side = Side(side)
        order = order or EngineConfig.DECK_ORDER_MIN
        if order > EngineConfig.DECK_ORDER_CAP:
            raise PrecisionCapExceededError(
                f"deck series order {order} exceeds cap {EngineConfig.DECK_ORDER_CAP}",
                curve=self.name, location=location,
            )
        key = (side, QQ.convert(location))
        cached = self._deck.get(key)
        if cached is not None and cached.order >= order:
            return cached
        with self._lock:
            cached = self._deck.get(key)
            if cached is not None and cached.order >= order:
                return cached
            target = max(order, EngineConfig.DECK_ORDER_MIN)
            if cached is not None:
                target = min(max(target, 2 * cached.order), EngineConfig.DECK_ORDER_CAP)
                logger.debug("deck_series_widened", curve=self.name,
                             location=format_rational(location), order=target)
            rp = deck_series(location, self.spec.function(side), target, side)
            self._deck[key] = rp
            return rp

    def ramification_points(self, side: Side = Side.X, order: Optional[int] = None) -> List[RamificationPoint]:
        return [self.deck(p, side, order) for p in self.ensure_side(side)]

    def d_op(self, f: MRat, var: int, side: Side = Side.X) -> MRat:
        """(d/dz_var f) / x'(z_var), ou / y'(z_var)"""
        return mrat_diff(to_mrat(f), var) / self.derivative(side, var)

    def swapped(self) -> "SpectralCurve":
        """
        A mesma curva com os papéis de x e y trocados.

        Os lados já validados são espelhados; o par de curvas compartilha a
        referência mútua, de modo que swapped().swapped() is self.
        """
        if self._swapped is None:
            with self._lock:
                if self._swapped is None:
                    mirrored = [Side.Y if s is Side.X else Side.X for s in self._locations]
                    other = SpectralCurve(self.spec.swapped(), mirrored)
                    other._swapped = self
                    self._swapped = other
        return self._swapped


def ramification_points(curve: CurveSpec, side: Side = Side.X,
                        order: Optional[int] = None) -> List[RamificationPoint]:
    return SpectralCurve(curve, (side,)).ramification_points(side, order)


def d_op(curve: SpectralCurve, f: MRat, var: int, side: Side = Side.X) -> MRat:
    return curve.d_op(f, var, side)
