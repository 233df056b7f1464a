"""
Troca x-y: diferenciais mistas omega^(g)_{m,n}.

Os passos expressam omega^(g)_{m,n+1} pela série e^{w y} W^x_{m+1,n}
(forma simples) ou pelos operadores L_r e e^{-u Theta} W^X (forma padrão).
A direção y -> x é o mesmo código rodando na visão trocada da tabela.

Também ficam aqui os verificadores que dependem das séries W: identidade
paramétrica, equações de laço de ordem r, relações explícitas de gênero
baixo, regularidade nas diagonais, classes de polos e invariância por
translação de x.
"""
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from sympy import QQ

from config.settings import Direction, Formula, Method, OperatorForm, Side
from core.classical_tr import check_r_loop, exactness_check, probe_sets, tr_run
from core.errors import (
    IrrationalPoleError,
    PreconditionError,
    UnstableEntryError,
    VerificationFailure,
)
from core.exact_algebra import (
    ONE,
    SYMBOLS,
    ZERO,
    MRat,
    const,
    diagonal_valuation,
    evaluate_at,
    generator_index,
    is_constant,
    mrat_diff,
    mrat_equal,
    mrat_inverse,
    pole_locations,
    rename,
    to_rational,
)
from core.models import (
    CorrDiff,
    OmegaTable,
    TableView,
    check_label,
    euler,
    is_stable,
    place,
    swap_blocks,
)
from core.operator_series import OperatorFrame, l_operator_series, set_partitions, w_cal
from core.spectral_curve import CurveSpec, SpectralCurve
from core.term_executor import TermExecutor
from utils.logger import get_logger


logger = get_logger("xy_swap_engine")


def _normalization(frame: OperatorFrame, m: int, n: int) -> MRat:
    """prod dx_M * dy(z) * prod dy_N, na forma do frame"""
    out = ONE
    for i in range(1, m + 1):
        out = out * frame.dx(i)
    for j in range(m + 1, m + n + 2):
        out = out * frame.dy(j)
    return out


def _check_step_label(g: int, m: int, n: int):
    if min(g, m, n) < 0:
        raise PreconditionError(f"invalid step label (g,m,n)=({g},{m},{n})")
    if (g, m, n) == (0, 0, 0):
        raise PreconditionError(
            "(g,m,n)=(0,0,0) has no swap step: omega^(0)_{0,1} = -x dy is a convention"
        )


# ---------------------------------------------------------------------------
# Passos de troca
# ---------------------------------------------------------------------------

def _simple_x_to_y(table: TableView, g: int, m: int, n: int,
                   executor: Optional[TermExecutor]) -> MRat:
    frame = OperatorFrame(table.curve, OperatorForm.SIMPLE)
    z = m + 1
    wpoly = w_cal(table, m, n, 2 * g, OperatorForm.SIMPLE, executor=executor)
    ratio = frame.dx(z) / frame.dy(z)

    def term(item: Tuple[int, MRat]) -> MRat:
        r, coeff = item
        value = coeff * ratio
        for _ in range(r):
            value = frame.derive_y(value, z)
        return value

    items = sorted((r, c) for r, c in wpoly.at_hbar(2 * g).items() if r >= 0)
    total = (executor or TermExecutor(1)).reduce_sum(term, items, ZERO, label=f"simple_step_{g}_{m}_{n}")
    return -total * _normalization(frame, m, n)


def _standard_x_to_y(table: TableView, g: int, m: int, n: int,
                     executor: Optional[TermExecutor]) -> MRat:
    frame = OperatorFrame(table.curve, OperatorForm.STANDARD)
    z = m + 1
    wx = w_cal(table, m, n, 2 * g, OperatorForm.STANDARD, executor=executor)
    lops = l_operator_series(g)
    theta = frame.theta(z)
    theta_inv = mrat_inverse(theta)
    dx_dy = frame.dx(z) / frame.dy(z)

    by_v: Dict[int, MRat] = {}
    for g_w in range(g + 1):
        g_l = g - g_w
        for r, coeff in wx.at_hbar(2 * g_w).items():
            if r < 0 or not coeff:
                continue
            c = coeff * dx_dy
            poly, power = lops.lr(g_l, r)
            scaled = c * theta_inv ** (-power)
            for j, a in poly.items():
                by_v[j] = by_v.get(j, ZERO) - scaled * const(a)
    if m + n == 0:
        d_theta = frame.derive_y(theta, z)
        weight = theta_inv ** (2 * g) * d_theta
        for monom, a in lops.a(g).terms():
            j = monom[0]
            if j >= 1 and a:
                by_v[j - 1] = by_v.get(j - 1, ZERO) + weight * const(a)
        if g == 0:
            by_v[0] = by_v.get(0, ZERO) + theta

    total = ZERO
    for j in sorted(by_v):
        value = by_v[j]
        for _ in range(j):
            value = frame.derive_y(value, z)
        total += value
    return total * _normalization(frame, m, n)


def _step(table: TableView, direction: Direction, g: int, m: int, n: int,
          kernel: Callable, formula: Formula, executor: Optional[TermExecutor]) -> CorrDiff:
    _check_step_label(g, m, n)
    direction = Direction(direction)
    if direction is Direction.Y_TO_X:
        dual = kernel(table.swapped(), g, n, m, executor)
        return CorrDiff(g, m + 1, n, swap_blocks(dual, n, m + 1), formula)
    return CorrDiff(g, m, n + 1, kernel(table, g, m, n, executor), formula)


def step_simple(table: TableView, direction: Direction, g: int, m: int, n: int,
                executor: Optional[TermExecutor] = None) -> CorrDiff:
    """
    x -> y: omega^(g)_{m,n+1} = -sum_r d_y^r [w^r] (dx/dy) e^{w y} W^x_{m+1,n}.

    y -> x: omega^(g)_{m+1,n} pela fórmula dual (mesmos argumentos g, m, n).
    """
    return _step(table, direction, g, m, n, _simple_x_to_y, Formula.SIMPLE_RECURSION, executor)


def step_standard(table: TableView, direction: Direction, g: int, m: int, n: int,
                  executor: Optional[TermExecutor] = None) -> CorrDiff:
    """
    Mesma saída de step_simple, calculada pela forma padrão: variáveis
    dX = -dx/x, dY = -dy/y, Theta = x y e operadores L_r(v, Theta).
    """
    return _step(table, direction, g, m, n, _standard_x_to_y, Formula.STANDARD_RECURSION, executor)


# ---------------------------------------------------------------------------
# Tabelas mistas
# ---------------------------------------------------------------------------

def mixed_labels(chi_max: int) -> List[Tuple[int, int, int]]:
    """Rótulos estáveis (g, m, n) com 2g-2+m+n <= chi_max, em ordem de preenchimento"""
    out = []
    for chi in range(1, chi_max + 1):
        for g in range(0, chi // 2 + 2):
            total = chi + 2 - 2 * g
            if total < 1:
                continue
            for n in range(total + 1):
                out.append((g, total - n, n))
    return sorted(out, key=lambda k: (euler(*k), k[2], k[0], k[1]))


def mixed_producer(base: TableView, method: Method = Method.SIMPLE,
                   executor: Optional[TermExecutor] = None):
    """
    Produtor de OmegaTable para todas as colunas: n = 0 vem da tabela base,
    n >= 1 do passo x -> y aplicado à própria tabela mista.
    """
    method = Method(method)

    def produce(table: OmegaTable, g: int, m: int, n: int) -> CorrDiff:
        if n == 0:
            return base.entry(g, m, 0)
        if method is Method.GRAPH:
            from core.graph_sums import graph_sum_mixed
            return graph_sum_mixed(base, g, m, n, executor)
        if method is Method.STANDARD:
            return step_standard(table, Direction.X_TO_Y, g, m, n - 1, executor)
        simple = step_simple(table, Direction.X_TO_Y, g, m, n - 1, executor)
        if method is Method.BOTH:
            standard = step_standard(table, Direction.X_TO_Y, g, m, n - 1, executor)
            if not mrat_equal(simple.body, standard.body):
                raise VerificationFailure(
                    f"simple and standard recursions disagree at (g,m,n)=({g},{m},{n})",
                    check="recursion_equivalence", g=g, m=m, n=n,
                )
            logger.log_check("recursion_equivalence", True, g=g, m=m, n=n)
        return simple

    return produce


def mixed_table(base: TableView, method: Method = Method.SIMPLE,
                executor: Optional[TermExecutor] = None) -> OmegaTable:
    return OmegaTable(base.curve, mixed_producer(base, method, executor))


def mixed_run(curve: Union[CurveSpec, SpectralCurve], chi_max: int, method: Method = Method.SIMPLE,
              executor: Optional[TermExecutor] = None) -> OmegaTable:
    """TR na coluna n = 0 e passos de troca no resto, até 2g-2+m+n <= chi_max"""
    base = tr_run(curve, chi_max, executor)
    table = mixed_table(base, method, executor)
    with logger.execution_context(str(uuid.uuid4()), "mixed_run", curve=base.curve.name,
                                  chi_max=chi_max, method=Method(method).value):
        for g, m, n in mixed_labels(chi_max):
            table.entry(g, m, n)
    return table


# ---------------------------------------------------------------------------
# Identidade paramétrica
# ---------------------------------------------------------------------------

@dataclass
class DualityReport:
    """Resultado da identidade paramétrica; falso com a primeira posição divergente"""
    passed: bool
    g: int
    m: int
    n: int
    direction: Optional[Direction] = None
    failing_slot: Optional[Tuple[int, int]] = None

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "g": self.g,
            "m": self.m,
            "n": self.n,
            "direction": self.direction.value if self.direction else None,
            "failing_slot": list(self.failing_slot) if self.failing_slot else None,
        }


def _duality_rhs(table: TableView, g: int, m: int, n: int) -> Dict[int, MRat]:
    """
    -sum_r (d_y - w~ dx/dy)^r [w^r] (dx/dy) e^{w y} W^x_{m+1,n}, como
    polinômio em w~ (dicionário expoente -> coeficiente).
    """
    frame = OperatorFrame(table.curve, OperatorForm.SIMPLE)
    z = m + 1
    wpoly = w_cal(table, m, n, 2 * g)
    ratio = frame.dx(z) / frame.dy(z)
    out: Dict[int, MRat] = {}
    for r, coeff in sorted(wpoly.at_hbar(2 * g).items()):
        if r < 0:
            continue
        poly = {0: coeff * ratio}
        for _ in range(r):
            nxt: Dict[int, MRat] = {}
            for p, c in poly.items():
                nxt[p] = nxt.get(p, ZERO) + frame.derive_y(c, z)
                nxt[p + 1] = nxt.get(p + 1, ZERO) - c * ratio
            poly = nxt
        for p, c in poly.items():
            out[p] = out.get(p, ZERO) - c
    return out


def _duality_one_side(table: TableView, g: int, m: int, n: int, order: int) -> Optional[Tuple[int, int]]:
    lhs = w_cal(table, m, n, 2 * g, side=Side.Y).at_hbar(2 * g)
    rhs = _duality_rhs(table, g, m, n)
    for p in range(min(set(lhs) | set(rhs) | {0}), order + 1):
        if not mrat_equal(lhs.get(p, ZERO), rhs.get(p, ZERO)):
            return (2 * g, p)
    return None


def check_parametric_duality(table: TableView, g: int, m: int, n: int,
                             orders: Tuple[int, int] = (2, 2)) -> DualityReport:
    """
    e^{w~ x} W^y_{m,n+1}(w~) = -sum_r (d_y - w~ dx/dy)^r [w^r](dx/dy) e^{w y} W^x_{m+1,n}(w)
    coeficiente a coeficiente em w~ (até orders[1]), e a identidade dual em
    w (até orders[0]) rodando o mesmo código na visão trocada.
    """
    _check_step_label(g, m, n)
    w_max, w_tilde_max = orders
    slot = _duality_one_side(table, g, m, n, w_tilde_max)
    if slot is not None:
        report = DualityReport(False, g, m, n, Direction.X_TO_Y, slot)
    else:
        slot = _duality_one_side(table.swapped(), g, n, m, w_max)
        report = DualityReport(slot is None, g, m, n,
                               Direction.Y_TO_X if slot is not None else None, slot)
    logger.log_check("parametric_duality", report.passed, **report.to_dict())
    return report


# ---------------------------------------------------------------------------
# Equações de laço de ordem r
# ---------------------------------------------------------------------------

def r_loop_coefficient(table: TableView, side: Side, r: int, g: int, m: int, n: int,
                       probes: Optional[Dict[int, Any]] = None) -> MRat:
    """
    [w^{r-1}] W^{x,(g)}_{m+1,n}(w; z) (lado x) ou [w~^{r-1}] W^{y,(g)}_{m,n+1}
    (lado y), no layout (M, z, N) com z = m+1; as variáveis espectadoras
    são avaliadas nas sondas, se dadas.

    W = e^{-w y} (e^{w y} W), logo o coeficiente é
    sum_j (-y)^j/j! [w^{r-1-j}] e^{w y} W, com j até r por causa do termo 1/w.
    """
    if r < 1:
        raise PreconditionError("r-loop equations start at r = 1", r=r)
    side = Side(side)
    z = m + 1
    wpoly = w_cal(table, m, n, 2 * g, side=side).at_hbar(2 * g)
    other = Side.Y if side is Side.X else Side.X
    # lado x: e^{-w y}; lado y: e^{-w~ x}
    minus_f = -table.curve.function(other, z)
    total = ZERO
    power = ONE
    for j in range(r + 1):
        if j:
            power = power * minus_f * const(QQ(1, j))
        c = wpoly.get(r - 1 - j)
        if c:
            total += power * c
    if probes:
        total = evaluate_at(total, probes)
    return total


@dataclass
class LoopReport:
    passed: bool
    g: int
    m: int
    n: int
    failures: List[Dict[str, Any]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "g": self.g, "m": self.m, "n": self.n,
                "failures": self.failures}


def check_loop_equations(table: TableView, g: int, m: int, n: int, r_max: int = 3,
                         sides: Sequence[Side] = (Side.X, Side.Y),
                         seed: Optional[int] = None) -> LoopReport:
    """Equações de laço r = 1..r_max nos dois lados, em todos os pontos de ramificação"""
    curve = table.curve
    z = m + 1
    spectators = [v for v in range(1, m + n + 2) if v != z]
    report = LoopReport(True, g, m, n)
    for side in sides:
        side = Side(side)
        points = curve.ramification_points(side)
        if not points:
            continue
        for r in range(1, r_max + 1):
            coeff = r_loop_coefficient(table, side, r, g, m, n)
            for probes in probe_sets(curve, spectators, seed):
                bound = evaluate_at(coeff, probes) if probes else coeff
                for rp in points:
                    if not check_r_loop(bound, r, rp, side, var=z, curve=curve):
                        report.passed = False
                        report.failures.append({
                            "side": side.value,
                            "r": r,
                            "point": str(rp.location),
                            "probes": {f"z{k}": str(v) for k, v in probes.items()},
                        })
    return report


# ---------------------------------------------------------------------------
# Relações explícitas de gênero baixo
# ---------------------------------------------------------------------------

class WorkedRelation(str, Enum):
    """Relações explícitas entre entradas da tabela mista"""
    GENUS0 = "genus0"
    GENUS1_ONE_POINT = "genus1-one-point"
    GENUS1_TWO_POINT = "genus1-two-point"
    GENUS2_ONE_POINT = "genus2-one-point"


class _FormOps:
    """D_x f = d(f/dx) e D_y f = d(f/dy) em formas na variável s"""

    def __init__(self, curve: SpectralCurve, s: int):
        self.curve = curve
        self.s = s
        self.xp = curve.derivative(Side.X, s)
        self.yp = curve.derivative(Side.Y, s)

    def dx_op(self, f: MRat, times: int = 1, var: Optional[int] = None) -> MRat:
        var = var or self.s
        xp = self.curve.derivative(Side.X, var)
        for _ in range(times):
            f = mrat_diff(f / xp, var)
        return f

    def dy_op(self, f: MRat, times: int = 1) -> MRat:
        for _ in range(times):
            f = mrat_diff(f / self.yp, self.s)
        return f

    def regularized_diagonal(self, table: TableView, other: int) -> MRat:
        """omega^(0)_{2,0}(s, other) - dx dx/(x - x)^2 restrita a other -> s"""
        return rename(self.regularized_pair(table, other), {other: self.s})

    def regularized_pair(self, table: TableView, other: int) -> MRat:
        s = self.s
        xs, xo = self.curve.function(Side.X, s), self.curve.function(Side.X, other)
        xo_p = self.curve.derivative(Side.X, other)
        body = place(table.get(0, 2, 0), [s, other])
        return body - self.xp * xo_p / (xs - xo) ** 2


def _genus0_residual(table: TableView, a: int, b: int) -> MRat:
    """
    omega_(s-bar, K) + sum sobre partições de K de
    D_y^{|P|-1}(prod omega_(s, J) / dx^{|P|-1}), gênero 0, |K_x| = a, |K_y| = b.
    """
    if a + b < 1:
        raise PreconditionError("the genus-zero relation needs at least one spectator")
    s = a + 1
    ops = _FormOps(table.curve, s)
    total = table.get(0, a, b + 1)
    elements = [i for i in range(1, a + b + 2) if i != s]
    for partition in set_partitions(elements):
        product = ONE
        for block in partition:
            I = [i for i in block if i < s]
            J = [j for j in block if j > s]
            product = product * place(table.get(0, len(I) + 1, len(J)), I + [s] + J)
        k = len(partition) - 1
        total += ops.dy_op(product / ops.xp ** k, k)
    return total


def _genus1_one_point_residual(table: TableView) -> MRat:
    ops = _FormOps(table.curve, 1)
    reg = ops.regularized_diagonal(table, 2)
    total = table.get(1, 0, 1) + table.get(1, 1, 0)
    total += ops.dy_op(reg / (2 * ops.xp))
    total += ops.dy_op(ops.dx_op(table.get(0, 1, 0), 2) * const(QQ(1, 24)), 2)
    return total


def _genus1_two_point_residual(table: TableView, spectator: Side) -> MRat:
    """Espectador do tipo x (layout: espectador 1, s = 2) ou y (s = 1, espectador 2)"""
    if Side(spectator) is Side.X:
        s = 2
        lhs = table.get(1, 1, 1) + table.get(1, 2, 0)
        pair = table.get(0, 2, 0)
        triple = rename(table.get(0, 3, 0), {3: 2})
    else:
        s = 1
        lhs = table.get(1, 0, 2) + table.get(1, 1, 1)
        pair = table.get(0, 1, 1)
        triple = rename(table.get(0, 2, 1), {2: 1, 3: 2})
    ops = _FormOps(table.curve, s)
    aux = SYMBOLS.fresh(1, [1, 2])[0]
    reg = ops.regularized_diagonal(table, aux)
    one_point = place(table.get(1, 1, 0), [s])
    leading = place(table.get(0, 1, 0), [s])
    xp = ops.xp
    total = lhs
    total += ops.dy_op((triple * const(QQ(1, 2)) + pair * one_point) / xp)
    total += ops.dy_op(ops.dx_op(pair, 2) * const(QQ(1, 24)) + pair * reg / (2 * xp ** 2), 2)
    total += ops.dy_op(pair * ops.dx_op(leading, 2) / (24 * xp), 3)
    return total


def _genus2_one_point_residual(table: TableView) -> MRat:
    ops = _FormOps(table.curve, 1)
    xp = ops.xp
    reg = ops.regularized_diagonal(table, 2)
    w1 = table.get(1, 1, 0)
    w0 = table.get(0, 1, 0)
    pair1 = rename(table.get(1, 2, 0), {2: 1})
    triple0 = rename(table.get(0, 3, 0), {2: 1, 3: 1})
    # D_x^2 na primeira perna da forma regularizada, depois a diagonal
    reg_pair = ops.regularized_pair(table, 2)
    reg_d2 = rename(ops.dx_op(reg_pair, 2) / table.curve.derivative(Side.X, 2), {2: 1})

    poly: Dict[int, MRat] = {
        1: pair1 / (2 * xp),
        2: ops.dx_op(w1, 2) * const(QQ(1, 24)) + triple0 / (6 * xp ** 2),
        3: reg_d2 * const(QQ(1, 24)),
        4: ops.dx_op(w0, 4) * const(QQ(1, 1920)),
    }
    inner = {0: w1, 1: reg / (2 * xp), 2: ops.dx_op(w0, 2) * const(QQ(1, 24))}
    for p, a in inner.items():
        for q, b in inner.items():
            poly[1 + p + q] = poly.get(1 + p + q, ZERO) + a * b / (2 * xp)

    total = table.get(2, 0, 1) + table.get(2, 1, 0)
    for r, value in sorted(poly.items()):
        total += ops.dy_op(value, r)
    return total


def worked_relation_residual(table: TableView, case: WorkedRelation, x_points: int = 0,
                             y_points: int = 0, spectator: Side = Side.X) -> MRat:
    """
    Resíduo exato (deve ser 0) de uma relação explícita entre entradas:

    * genus0: omega_(s-bar,K) + sum_P D_y^{|P|-1}(prod omega_(s,J_P)/dx^{|P|-1}),
      com x_points espectadores do tipo x e y_points do tipo y;
    * genus1-one-point, genus1-two-point (espectador x ou y), genus2-one-point.
    """
    case = WorkedRelation(case)
    if case is WorkedRelation.GENUS0:
        residual = _genus0_residual(table, x_points, y_points)
    elif case is WorkedRelation.GENUS1_ONE_POINT:
        residual = _genus1_one_point_residual(table)
    elif case is WorkedRelation.GENUS1_TWO_POINT:
        residual = _genus1_two_point_residual(table, spectator)
    else:
        residual = _genus2_one_point_residual(table)
    logger.log_check("worked_relation", not residual, case=case.value,
                     x_points=x_points, y_points=y_points)
    return residual


# ---------------------------------------------------------------------------
# Diagonais, polos, exatidão e translação
# ---------------------------------------------------------------------------

def _block_pairs(entry: CorrDiff) -> List[Tuple[int, int]]:
    pairs = []
    for block in (entry.x_vars, entry.y_vars):
        pairs += [(i, j) for idx, i in enumerate(block) for j in block[idx + 1:]]
    return pairs


def diagonal_regularity(entry: CorrDiff, curve: SpectralCurve) -> bool:
    """
    Entradas estáveis não têm polos nas diagonais de um mesmo bloco; para
    (0,2,0) e (0,0,2) o termo dx dx/(x-x)^2 (ou dy dy/(y-y)^2) é subtraído antes.
    """
    body = entry.body
    if entry.label in ((0, 2, 0), (0, 0, 2)):
        side = Side.X if entry.m else Side.Y
        f1, f2 = curve.function(side, 1), curve.function(side, 2)
        body = body - curve.derivative(side, 1) * curve.derivative(side, 2) / (f1 - f2) ** 2
    elif not entry.stable:
        raise UnstableEntryError(f"no diagonal regularity statement for {entry.label}")
    passed = all(diagonal_valuation(body, i, j) >= 0 for i, j in _block_pairs(entry))
    logger.log_check("diagonal_regularity", passed, label=list(entry.label))
    return passed


@dataclass
class PoleReport:
    passed: bool
    offending: List[Dict[str, Any]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "offending": self.offending}


def pole_classes(entry: CorrDiff, curve: SpectralCurve) -> PoleReport:
    """
    Variáveis do bloco x só têm polos nos zeros de dx (ou em z_j do bloco y);
    variáveis do bloco y só nos zeros de dy (ou em z_i do bloco x).
    """
    if not entry.stable:
        raise UnstableEntryError(f"pole classification is stated for stable entries, got {entry.label}")
    report = PoleReport(True)
    x_vars, y_vars = entry.x_vars, entry.y_vars
    for block, side, partners in ((x_vars, Side.X, y_vars), (y_vars, Side.Y, x_vars)):
        allowed = set(curve.locations(side))
        for var in block:
            try:
                found = pole_locations(entry.body, var)
            except IrrationalPoleError as e:
                report.passed = False
                report.offending.append({"var": var, "error": e.message})
                continue
            for loc in found:
                if is_constant(loc):
                    ok = to_rational(loc) in allowed
                else:
                    ok = generator_index(loc) in partners
                if not ok:
                    report.passed = False
                    report.offending.append({"var": var, "side": side.value, "location": str(loc.as_expr())})
    logger.log_check("pole_classes", report.passed, label=list(entry.label),
                     offending=report.offending or None)
    return report


def neighbour_exactness(table: TableView, g: int, m: int, n: int) -> bool:
    """omega^(g)_{m+1,n} + omega^(g)_{m,n+1} é exata na variável comum z = m+1"""
    total = table.get(g, m + 1, n) + table.get(g, m, n + 1)
    passed = exactness_check(total, m + 1)
    logger.log_check("neighbour_exactness", passed, g=g, m=m, n=n)
    return passed


def shift_invariance_residual(spec: CurveSpec, c: Any, g: int, m: int, n: int,
                              method: Method = Method.SIMPLE,
                              executor: Optional[TermExecutor] = None) -> MRat:
    """
    Diferença entre omega^(g)_{m,n} calculada com x e com x + c.

    method=SIMPLE usa a tabela mista; method=GRAPH usa graph_sum_swap
    (m deve ser 0). Para rótulos estáveis o resíduo é 0.
    """
    check_label(g, m, n)
    if not is_stable(g, m, n):
        raise UnstableEntryError(f"omega^(0)_{{0,1}} moves with x; use a stable label, got {(g, m, n)}")
    chi = euler(g, m, n)
    method = Method(method)
    values = []
    for variant in (spec, spec.shifted(c)):
        curve = SpectralCurve(variant)
        base = tr_run(curve, max(chi, 1), executor)
        if method is Method.GRAPH:
            if m:
                raise PreconditionError("graph_sum_swap produces m = 0 entries only", m=m)
            from core.graph_sums import graph_sum_swap
            values.append(graph_sum_swap(base, g, n, executor).body)
        else:
            values.append(mixed_table(base, method, executor).get(g, m, n))
    residual = values[1] - values[0]
    logger.log_check("shift_invariance", not residual, g=g, m=m, n=n, method=method.value,
                     shift=str(c))
    return residual
