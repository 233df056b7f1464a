"""
Separação de polos.

O passo simples com omega^(g)_{m+1,n} zerado devolve a soma
omega^(g)_{m+1,n} + omega^(g)_{m,n+1} no layout comum (M, z, N), calculada só
com níveis inferiores. Na variável z a primeira parcela tem polos nos zeros
de dx e em z_j (j em N); a segunda nos zeros de dy e em z_i (i em M). As
partes principais separam as duas, sem resíduos da recursão clássica.
"""
import uuid
from typing import Dict, List, Optional, Tuple, Union

from sympy import QQ

from config.settings import Direction, Formula, Side
from core.errors import IrrationalPoleError, PoleSplitError, VerificationFailure
from core.exact_algebra import ZERO, MRat, generator_index, is_constant, mrat_equal, principal_parts, to_rational
from core.models import CorrDiff, OmegaTable, OverrideView, TableView, euler
from core.spectral_curve import CurveSpec, SpectralCurve
from core.term_executor import TermExecutor
from core.xy_swap_engine import mixed_labels, step_simple
from utils.logger import get_logger


logger = get_logger("pole_splitting")


def neighbour_sum(table: TableView, g: int, m: int, n: int,
                  executor: Optional[TermExecutor] = None) -> MRat:
    """omega^(g)_{m+1,n} + omega^(g)_{m,n+1} a partir dos níveis inferiores"""
    blind = OverrideView(table, {(g, m + 1, n): ZERO})
    return step_simple(blind, Direction.X_TO_Y, g, m, n, executor).body


def split_poles(rhs: MRat, curve: SpectralCurve, g: int, m: int, n: int) -> Tuple[CorrDiff, CorrDiff]:
    """
    Divide rhs = omega^(g)_{m+1,n} + omega^(g)_{m,n+1} pelas posições dos polos
    em z = m+1. Devolve (omega_{m+1,n}, omega_{m,n+1}).
    """
    z = m + 1
    left_label, right_label = (g, m + 1, n), (g, m, n + 1)
    if not rhs:
        return (CorrDiff(*left_label, ZERO, Formula.POLE_SPLITTING),
                CorrDiff(*right_label, ZERO, Formula.POLE_SPLITTING))
    dx_zeros = {QQ.convert(p) for p in curve.locations(Side.X)}
    dy_zeros = {QQ.convert(p) for p in curve.locations(Side.Y)}
    try:
        parts = principal_parts(rhs, z)
    except IrrationalPoleError as e:
        raise PoleSplitError(f"cannot split {left_label}/{right_label}: {e.message}", g=g, m=m, n=n)

    left, right = ZERO, ZERO
    for loc in parts.parts:
        term = parts.term(loc)
        if is_constant(loc):
            p = to_rational(loc)
            if p in dx_zeros:
                left += term
            elif p in dy_zeros:
                right += term
            else:
                raise PoleSplitError(f"pole at z{z} = {p} is neither a zero of dx nor of dy",
                                     g=g, m=m, n=n, location=str(p))
        else:
            partner = generator_index(loc)
            if partner is not None and partner > z:
                left += term
            elif partner is not None and partner < z:
                right += term
            else:
                raise PoleSplitError(f"pole at z{z} = {loc.as_expr()} has no class",
                                     g=g, m=m, n=n, location=str(loc.as_expr()))
    if rhs - left - right:
        raise PoleSplitError(f"nonzero polynomial part in z{z} while splitting {left_label}/{right_label}",
                             g=g, m=m, n=n)
    logger.debug("poles_split", g=g, m=m, n=n, poles=len(parts.parts))
    return (CorrDiff(*left_label, left, Formula.POLE_SPLITTING),
            CorrDiff(*right_label, right, Formula.POLE_SPLITTING))


def _level_labels(g: int, total: int) -> List[Tuple[int, int, int]]:
    return [(g, a, total - a) for a in range(total, -1, -1)]


def split_level(table: OmegaTable, g: int, total: int,
                executor: Optional[TermExecutor] = None) -> List[CorrDiff]:
    """
    Todas as entradas (g, a, total-a) de um nível. Cada entrada interna sai de
    duas separações vizinhas, que precisam coincidir.
    """
    executor = executor or TermExecutor(1)

    def split(m: int) -> Tuple[CorrDiff, CorrDiff]:
        n = total - 1 - m
        return split_poles(neighbour_sum(table, g, m, n), table.curve, g, m, n)

    pairs = executor.map(split, list(range(total)), label=f"split_level_{g}_{total}")
    found: Dict[Tuple[int, int, int], CorrDiff] = {}
    for left, right in pairs:
        for cd in (left, right):
            seen = found.get(cd.label)
            if seen is None:
                found[cd.label] = cd
            elif not mrat_equal(seen.body, cd.body):
                raise VerificationFailure(
                    f"neighbouring splits disagree on {cd.label}",
                    check="pole_splitting_consistency", label=list(cd.label),
                )
    logger.log_check("pole_splitting_consistency", True, g=g, level=total)
    return [found[k] for k in _level_labels(g, total)]


def split_fill(curve: Union[CurveSpec, SpectralCurve], chi_max: int,
               executor: Optional[TermExecutor] = None) -> OmegaTable:
    """
    Tabela mista completa até 2g-2+m+n <= chi_max, coluna n = 0 incluída,
    só por separação de polos.
    """
    if isinstance(curve, CurveSpec):
        curve = SpectralCurve(curve, (Side.X, Side.Y))
    curve.ensure_side(Side.Y)
    table = OmegaTable(curve)
    with logger.execution_context(str(uuid.uuid4()), "split_fill", curve=curve.name, chi_max=chi_max):
        for chi in range(1, chi_max + 1):
            for g in range(0, chi // 2 + 2):
                total = chi + 2 - 2 * g
                if total < 1:
                    continue
                for cd in split_level(table, g, total, executor):
                    table.put(cd)
    logger.info("split_fill_done", curve=curve.name, chi_max=chi_max, entries=len(table.entries))
    return table


def splitting_producer(executor: Optional[TermExecutor] = None):
    """Produtor de OmegaTable que preenche o nível inteiro do rótulo pedido"""

    def produce(table: OmegaTable, g: int, m: int, n: int) -> CorrDiff:
        table.prefetch(k for k in mixed_labels(euler(g, m, n) - 1))
        level = split_level(table, g, m + n, executor)
        for cd in level:
            if cd.label != (g, m, n):
                table.put(cd)
        return next(cd for cd in level if cd.label == (g, m, n))

    return produce
