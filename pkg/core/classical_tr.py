"""
Recursão topológica clássica e verificadores das equações de laço.

A recursão calcula omega^(g)_{m,0} por resíduos nos zeros de dx: o integrando
é expandido como LaurentData em cada ponto de ramificação, usando a série de
deck, com a janela dobrada até alcançar o termo de resíduo.
"""
import random
import uuid
from itertools import combinations
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from sympy import QQ

from config.settings import EngineConfig, Formula, Side
from core.errors import (
    PrecisionCapExceededError,
    PreconditionError,
    UnstableEntryError,
    WindowError,
)
from core.exact_algebra import (
    ONE,
    SYMBOLS,
    ZERO,
    LaurentData,
    MRat,
    const,
    evaluate_at,
    is_constant,
    expand_rational,
    laurent_from_poly,
    poly_value,
    principal_parts,
    restrict_diagonal,
    to_mrat,
    to_rational,
)
from core.models import CorrDiff, OmegaTable, OverrideView, TableView, euler, is_stable, place
from core.spectral_curve import CurveSpec, RamificationPoint, SpectralCurve
from core.term_executor import TermExecutor
from utils.logger import get_logger


logger = get_logger("classical_tr")


# ---------------------------------------------------------------------------
# Recursão
# ---------------------------------------------------------------------------

def bracket(table: TableView, g: int, m: int) -> MRat:
    """
    Soma entre colchetes da recursão para omega^(g)_{m,0}(z1, J).

    J ocupa as variáveis 2..m; q = m+1 e sigma(q) = m+2. Os termos com
    omega^(0)_{1,0} ficam de fora.
    """
    J = list(range(2, m + 1))
    q, s = m + 1, m + 2
    total = ZERO
    if g >= 1:
        total += place(table.get(g - 1, m + 1, 0), [q, s] + J)
    for g1 in range(g + 1):
        g2 = g - g1
        for size in range(len(J) + 1):
            for I1 in combinations(J, size):
                I2 = [j for j in J if j not in I1]
                if (g1, len(I1)) == (0, 0) or (g2, len(I2)) == (0, 0):
                    continue
                left = place(table.get(g1, len(I1) + 1, 0), [q] + list(I1))
                right = place(table.get(g2, len(I2) + 1, 0), [s] + I2)
                total += left * right
    return total


def _kernel_denominator(curve: SpectralCurve, rp: RamificationPoint, prec: int) -> LaurentData:
    """y x'(z) - y(sigma) x'(sigma) sigma'(z) em z = p + t"""
    yx = curve.y * curve.derivative(Side.X)
    p = rp.location
    own = expand_rational(yx, {1: rp.point()}, prec, point=p)
    image = expand_rational(yx, {1: rp.sigma_point()}, prec, point=p)
    dsigma = laurent_from_poly(rp.sigma_derivative(), p, prec)
    return own - image * dsigma


def _residue_at(curve: SpectralCurve, integrand: MRat, kernel: MRat, p: Any, q: int, s: int) -> MRat:
    iq, i_s = SYMBOLS.index(q), SYMBOLS.index(s)
    pole_bound = max(integrand.denom.degree(iq), 0) + max(integrand.denom.degree(i_s), 0) + 2
    order = EngineConfig.initial_deck_order(pole_bound)
    for _ in range(EngineConfig.LAURENT_WIDEN_LIMIT + 1):
        rp = curve.deck(p, Side.X, order)
        prec = order
        rules = {q: rp.point(), s: rp.sigma_point()}
        series = expand_rational(integrand, rules, prec, point=p)
        series = series * expand_rational(kernel, rules, prec, point=p)
        series = series * _kernel_denominator(curve, rp, prec).inverse()
        series = series * laurent_from_poly(rp.sigma_derivative(), p, prec)
        if series.max_order >= -1:
            return series.residue()
        order *= 2
        logger.debug("residue_window_widened", curve=curve.name, point=str(p), order=order)
    raise PrecisionCapExceededError("residue window did not reach order -1",
                                    curve=curve.name, point=p)


def tr_entry(table: TableView, g: int, m: int, executor: Optional[TermExecutor] = None) -> CorrDiff:
    """omega^(g)_{m,0} estável pela recursão (dependências vêm da tabela)"""
    if not is_stable(g, m, 0):
        raise UnstableEntryError(f"(g,m)=({g},{m}) is unstable; use the convention")
    curve = table.curve
    executor = executor or TermExecutor()
    q, s = m + 1, m + 2
    SYMBOLS.check(s)
    br = bracket(table, g, m)
    z1, zq, zs = SYMBOLS.gen(1), SYMBOLS.gen(q), SYMBOLS.gen(s)
    kernel = ONE / (z1 - zs) - ONE / (z1 - zq)
    points = curve.locations(Side.X)
    residues = executor.map(lambda p: _residue_at(curve, br, kernel, p, q, s), points,
                            label=f"tr_residues_{g}_{m}")
    body = ZERO
    for r in residues:
        body += r
    return CorrDiff(g, m, 0, body * const(QQ(1, 2)), Formula.CLASSICAL_TR)


def classical_producer(executor: Optional[TermExecutor] = None) -> Callable[[OmegaTable, int, int, int], CorrDiff]:
    """Produtor da coluna n = 0 para OmegaTable"""

    def produce(table: OmegaTable, g: int, m: int, n: int) -> CorrDiff:
        if n:
            raise PreconditionError(
                f"classical recursion only produces n = 0 entries, got (g,m,n)=({g},{m},{n})"
            )
        return tr_entry(table, g, m, executor)

    return produce


def stable_labels(chi_max: int, n: int = 0) -> List[tuple]:
    """Rótulos (g, m, n) estáveis com 2g-2+m+n <= chi_max, em ordem de preenchimento"""
    out = []
    for chi in range(1, chi_max + 1):
        for g in range(0, (chi + 2 - n) // 2 + 1):
            m = chi + 2 - 2 * g - n
            if m >= 0 and m + n >= 1:
                out.append((g, m, n))
    return sorted(out, key=lambda k: (euler(*k), k[1]))


def tr_run(curve: Union[CurveSpec, SpectralCurve], chi_max: int,
           executor: Optional[TermExecutor] = None) -> OmegaTable:
    """Preenche a coluna n = 0 até 2g-2+m <= chi_max"""
    if chi_max < 1:
        raise PreconditionError("chi_max must be at least 1", chi_max=chi_max)
    if isinstance(curve, CurveSpec):
        curve = SpectralCurve(curve)
    table = OmegaTable(curve, classical_producer(executor))
    with logger.execution_context(str(uuid.uuid4()), "tr_run", curve=curve.name, chi_max=chi_max):
        for g, m, _ in stable_labels(chi_max):
            table.entry(g, m, 0)
    return table


# ---------------------------------------------------------------------------
# Espaços Xi e equações de laço
# ---------------------------------------------------------------------------

def _with_order(rp: RamificationPoint, order: int, curve: Optional[SpectralCurve]) -> RamificationPoint:
    if rp.order >= order:
        return rp
    if curve is None:
        raise WindowError(f"deck series known to order {rp.order}, need {order}",
                          point=rp.location)
    return curve.deck(rp.location, rp.side, order)


def _compose_with_deck(data: LaurentData, rp: RamificationPoint) -> LaurentData:
    """f(sigma(p+t)) a partir da expansão de f em p"""
    u = LaurentData(rp.location, 1, tuple(to_mrat(c) for c in rp.deck))
    u_inv = u.inverse()
    one = LaurentData(rp.location, 0, (ONE,) + (ZERO,) * rp.order)
    total: Optional[LaurentData] = None
    for k in range(data.min_order, data.max_order + 1):
        c = data.coefficient(k)
        if not c:
            continue
        base, power = (u, k) if k >= 0 else (u_inv, -k)
        term = one
        for _ in range(power):
            term = term * base
        term = term.scale(c)
        total = term if total is None else total + term
    if total is None:
        return LaurentData(rp.location, data.min_order, (ZERO,))
    hi = min(total.max_order, data.max_order)
    return total.window(min(total.min_order, hi), hi)


def xi_membership(f: Union[MRat, LaurentData], rp: RamificationPoint, var: int = 1,
                  curve: Optional[SpectralCurve] = None) -> bool:
    """f(z) + f(sigma(z)) holomorfa no ponto de ramificação"""
    if isinstance(f, LaurentData):
        if f.min_order >= 0:
            return True
        rp = _with_order(rp, max(EngineConfig.DECK_ORDER_MIN, f.max_order - f.min_order + 2), curve)
        total = f + _compose_with_deck(f, rp)
        if total.max_order < -1:
            raise WindowError("Laurent window too short for the Xi test", point=rp.location)
        return all(not total.coefficient(k) for k in range(total.min_order, 0))

    f = to_mrat(f)
    v = max(f.denom.degree(SYMBOLS.index(var)), 0)
    if v <= 1:
        return True
    prec = 2 * v + 1
    rp = _with_order(rp, prec, curve)
    own = expand_rational(f, {var: rp.point()}, prec, point=rp.location)
    image = expand_rational(f, {var: rp.sigma_point()}, prec, point=rp.location)
    total = own + image
    return all(not total.coefficient(k) for k in range(total.min_order, 0))


def probe_sets(curve: SpectralCurve, variables: Sequence[int], seed: Optional[int] = None,
               sets: Optional[int] = None) -> List[Dict[int, Any]]:
    """
    Valores racionais genéricos e distintos para variáveis espectadoras.

    Evita zeros e polos de x', y' e os polos de x e y; a semente fica nos logs.
    """
    seed = EngineConfig.PROBE_SEED if seed is None else seed
    sets = sets or EngineConfig.PROBE_SETS
    if not variables:
        return [{}]
    avoid = []
    for f in (curve.derivative(Side.X), curve.derivative(Side.Y)):
        avoid += [f.numer, f.denom]
    avoid += [curve.x.denom, curve.y.denom]
    out = []
    for k in range(sets):
        rng = random.Random(seed * 1009 + k)
        chosen: Dict[int, Any] = {}
        used = set()
        for var in variables:
            while True:
                c = QQ(rng.randint(-97, 97), rng.randint(1, 23))
                if c in used or any(not poly_value(poly, c) for poly in avoid):
                    continue
                used.add(c)
                chosen[var] = c
                break
        out.append(chosen)
    return out


def _bar_w(table: TableView, g: int, k: int) -> MRat:
    """W-barra^(g)_{k,0} = omega / prod x'(z_i), layout canônico"""
    body = table.get(g, k, 0)
    for i in range(1, k + 1):
        body = body / table.curve.derivative(Side.X, i)
    return body


def _regularized_pair(curve: SpectralCurve, a: int, b: int) -> MRat:
    """W-barra^(0)_{2,0}(z_a, z_b) - 1/(x(z_a) - x(z_b))^2"""
    xa, xb = curve.function(Side.X, a), curve.function(Side.X, b)
    za, zb = SYMBOLS.gen(a), SYMBOLS.gen(b)
    pa, pb = curve.derivative(Side.X, a), curve.derivative(Side.X, b)
    return ONE / ((za - zb) ** 2 * pa * pb) - ONE / (xa - xb) ** 2


def linear_loop_function(table: TableView, g: int, m: int) -> MRat:
    """W-barra^(g)_{m+1,0}(z_M, z) com z = z_{m+1}"""
    return _bar_w(table, g, m + 1)


def quadratic_loop_function(table: TableView, g: int, m: int) -> MRat:
    """
    W-barra^(g-1)_{m+2,0}(z_M, z, z) + soma de W-barra W-barra, z = z_{m+1}.

    O termo diagonal de (0, 2) usa a forma regularizada.
    """
    z, z2 = m + 1, m + 2
    M = list(range(1, m + 1))
    total = ZERO
    if g >= 1:
        if (g - 1, m + 2) == (0, 2):
            diag = _regularized_pair(table.curve, z, z2)
        else:
            diag = place(_bar_w(table, g - 1, m + 2), M + [z, z2])
        total += restrict_diagonal(diag, z2, z)
    for g1 in range(g + 1):
        g2 = g - g1
        for size in range(m + 1):
            for I1 in combinations(M, size):
                I2 = [i for i in M if i not in I1]
                left = place(_bar_w(table, g1, len(I1) + 1), list(I1) + [z])
                right = place(_bar_w(table, g2, len(I2) + 1), I2 + [z])
                total += left * right
    return total


def _check_on_probes(table: TableView, f: MRat, var: int, spectators: Sequence[int],
                     rp: RamificationPoint, check: str, seed: Optional[int], **fields) -> bool:
    for probes in probe_sets(table.curve, spectators, seed):
        bound = evaluate_at(f, probes) if probes else f
        if not xi_membership(bound, rp, var=var, curve=table.curve):
            logger.log_check(check, False, point=str(rp.location),
                             probes={f"z{k}": str(v) for k, v in probes.items()}, **fields)
            return False
    logger.log_check(check, True, point=str(rp.location), **fields)
    return True


def check_linear_loop(table: TableView, g: int, m: int, rp: RamificationPoint,
                      seed: Optional[int] = None) -> bool:
    f = linear_loop_function(table, g, m)
    return _check_on_probes(table, f, m + 1, list(range(1, m + 1)), rp,
                            "linear_loop", seed, g=g, m=m)


def check_quadratic_loop(table: TableView, g: int, m: int, rp: RamificationPoint,
                         seed: Optional[int] = None) -> bool:
    f = quadratic_loop_function(table, g, m)
    return _check_on_probes(table, f, m + 1, list(range(1, m + 1)), rp,
                            "quadratic_loop", seed, g=g, m=m)


def check_r_loop(wcal_coeff: Union[MRat, LaurentData], r: int, rp: RamificationPoint,
                 side: Side = Side.X, var: int = 1, curve: Optional[SpectralCurve] = None) -> bool:
    """Pertinência em Xi^x (ou Xi^y) do coeficiente [w^(r-1)] já calculado"""
    if r < 1:
        raise PreconditionError("r-loop equations start at r = 1", r=r)
    if Side(side) is not rp.side:
        raise PreconditionError(f"ramification point belongs to the {rp.side.value}-side")
    passed = xi_membership(wcal_coeff, rp, var=var, curve=curve)
    logger.log_check("r_loop", passed, r=r, side=Side(side).value, point=str(rp.location))
    return passed


def corrupt_table(table: TableView, label: tuple, term: MRat) -> OverrideView:
    """Tabela com um termo somado a uma entrada (testes negativos)"""
    return OverrideView(table, {tuple(label): table.get(*label) + term})


# ---------------------------------------------------------------------------
# Projeção e exatidão
# ---------------------------------------------------------------------------

def _project_variable(f: MRat, var: int, points: Sequence[Any]) -> MRat:
    """Soma dos resíduos de (1/(z - z') - 1/(z - p)) f(z') dz' nos pontos p"""
    z = SYMBOLS.gen(var)
    v = max(f.denom.degree(SYMBOLS.index(var)), 0)
    T = SYMBOLS.scratch
    out = ZERO
    for p in points:
        series = expand_rational(f, {var: T + QQ.convert(p)}, 2 * v + 1, point=p)
        for k in range(2, -series.min_order + 1):
            c = series.coefficient(-k)
            if c:
                out += c / (z - QQ.convert(p)) ** k
    return out


def check_projection(table: TableView, g: int, m: int) -> bool:
    """
    Propriedade de projeção de omega^(g)_{m,0}: a fórmula de resíduos variável
    por variável deve devolver a própria entrada; além disso os polos em cada
    variável ficam nos zeros de dx, sem parte polinomial nem resíduos.
    """
    if not is_stable(g, m, 0):
        raise UnstableEntryError(f"projection property needs a stable label, got (g,m)=({g},{m})")
    body = table.get(g, m, 0)
    points = table.curve.locations(Side.X)
    projected = body
    for var in range(1, m + 1):
        projected = _project_variable(projected, var, points)
    literal = not (projected - body)

    shortcut = True
    allowed = set(QQ.convert(p) for p in points)
    for var in range(1, m + 1):
        pp = principal_parts(body, var)
        for loc, coeffs in pp.parts.items():
            if not is_constant(loc) or to_rational(loc) not in allowed:
                shortcut = False
            elif coeffs[0]:
                shortcut = False
        if shortcut and body.numer.degree(SYMBOLS.index(var)) >= body.denom.degree(SYMBOLS.index(var)):
            shortcut = False
    logger.log_check("projection", literal and shortcut, g=g, m=m,
                     literal=literal, shortcut=shortcut)
    return literal and shortcut


def exactness_check(f: MRat, var: int = 1) -> bool:
    """f dz é exata em z_var: todos os resíduos finitos se anulam"""
    pp = principal_parts(to_mrat(f), var)
    return all(not coeffs[0] for coeffs in pp.parts.values())

