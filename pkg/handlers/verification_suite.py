"""
Suíte de verificação do comando verify.

Roda as invariantes de todos os módulos sobre a tabela mista de uma curva e
devolve um relatório por verificação, com o contraexemplo quando falha.
"""
import traceback
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from sympy import QQ

from config.settings import Direction, EngineConfig, Method, Side
from core.classical_tr import check_projection, classical_producer
from core.errors import EngineError
from core.exact_algebra import SYMBOLS, const, mrat_equal
from core.graph_sums import graph_sum_mixed
from core.models import OmegaTable, TableView, is_stable
from core.pole_splitting import split_fill
from core.special_curves import wk_identities
from core.spectral_curve import CurveSpec, SpectralCurve
from core.term_executor import TermExecutor
from core.xy_swap_engine import (
    WorkedRelation,
    check_loop_equations,
    check_parametric_duality,
    diagonal_regularity,
    mixed_labels,
    mixed_table,
    pole_classes,
    shift_invariance_residual,
    step_standard,
    worked_relation_residual,
)
from utils.logger import get_logger
from utils.serialization import format_mrat


logger = get_logger("verification_suite")


@dataclass
class CheckRecord:
    check: str
    passed: bool
    label: Optional[Tuple[int, int, int]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        payload = {"check": self.check, "passed": self.passed}
        if self.label is not None:
            payload["label"] = list(self.label)
        if self.details:
            payload["details"] = self.details
        return payload


@dataclass
class VerificationReport:
    curve: str
    chi: int
    seed: int
    records: List[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failing(self) -> List[str]:
        return sorted({r.check for r in self.records if not r.passed})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve": self.curve,
            "chi": self.chi,
            "seed": self.seed,
            "passed": self.passed,
            "failing": self.failing(),
            "checks": [r.to_dict() for r in self.records],
            "limits": EngineConfig.as_dict(),
        }


def _is_airy(spec: CurveSpec) -> bool:
    z = SYMBOLS.gen(1)
    return mrat_equal(spec.x, z**2 * const(QQ(1, 2))) and mrat_equal(spec.y, z)


class VerificationSuite:
    """
    Invariantes sobre a tabela mista até 2g-2+m+n <= chi.

    base substitui a coluna n = 0 (por exemplo uma tabela corrompida nos
    testes negativos); sem ela a coluna vem da recursão clássica.
    """

    def __init__(self, spec: CurveSpec, chi: int, seed: int,
                 executor: Optional[TermExecutor] = None, base: Optional[TableView] = None):
        self.spec = spec
        self.chi = chi
        self.seed = seed
        self.executor = executor or TermExecutor(1)
        self.curve = base.curve if base is not None else SpectralCurve(spec, (Side.X, Side.Y))
        self.base = base if base is not None else OmegaTable(self.curve, classical_producer(self.executor))
        self.table = mixed_table(self.base, Method.SIMPLE, self.executor)
        self.report = VerificationReport(spec.name, chi, seed)

    def _record(self, check: str, label: Optional[Tuple[int, int, int]], fn: Callable[[], Any]):
        """fn devolve bool, um relatório com __bool__/to_dict, ou um resíduo (0 passa)"""
        try:
            outcome = fn()
        except EngineError as e:
            self.report.records.append(CheckRecord(check, False, label, e.to_dict()))
            return
        except Exception as e:
            logger.error("verification_check_crashed", check=check, error=str(e),
                         traceback=traceback.format_exc())
            self.report.records.append(CheckRecord(check, False, label,
                                                   {"error": str(e), "error_type": type(e).__name__}))
            return
        if isinstance(outcome, bool):
            record = CheckRecord(check, outcome, label)
        elif hasattr(outcome, "to_dict"):
            record = CheckRecord(check, bool(outcome), label,
                                 {} if bool(outcome) else outcome.to_dict())
        else:
            record = CheckRecord(check, not outcome, label,
                                 {} if not outcome else {"residual": format_mrat(outcome)})
        self.report.records.append(record)

    def _entry_checks(self, g: int, m: int, n: int):
        label = (g, m, n)
        try:
            entry = self.table.entry(g, m, n)
        except EngineError as e:
            self.report.records.append(CheckRecord("entry", False, label, e.to_dict()))
            return
        self._record("diagonal_regularity", label, lambda: diagonal_regularity(entry, self.curve))
        self._record("pole_classes", label, lambda: pole_classes(entry, self.curve))
        if n == 0:
            self._record("projection", label, lambda: check_projection(self.base, g, m))
            return
        self._record("recursion_equivalence", label, lambda: mrat_equal(
            entry.body, step_standard(self.table, Direction.X_TO_Y, g, m, n - 1, self.executor).body))
        self._record("graph_sum", label, lambda: mrat_equal(
            entry.body, graph_sum_mixed(self.base, g, m, n, self.executor).body))

    def _step_checks(self, g: int, m: int, n: int):
        """Verificações ligadas ao passo (g, m, n) -> (g, m, n+1)"""
        label = (g, m, n)
        self._record("loop_equations", label,
                     lambda: check_loop_equations(self.table, g, m, n, r_max=3, seed=self.seed))
        self._record("parametric_duality", label, lambda: check_parametric_duality(self.table, g, m, n))

    def _pole_splitting(self):
        def compare():
            split = split_fill(self.spec, self.chi, self.executor)
            for label in mixed_labels(self.chi):
                if not mrat_equal(split.get(*label), self.table.get(*label)):
                    return CheckRecord("pole_splitting", False, label)
            return True

        try:
            outcome = compare()
        except EngineError as e:
            self.report.records.append(CheckRecord("pole_splitting", False, None, e.to_dict()))
            return
        if outcome is True:
            self.report.records.append(CheckRecord("pole_splitting", True))
        else:
            self.report.records.append(outcome)

    def _worked_relations(self):
        genus0 = [(2, 0), (1, 1), (0, 2), (2, 1), (1, 2)]
        cases: List[Tuple[str, int, Callable[[], Any]]] = [
            (f"genus0_x{a}_y{b}", a + b - 1,
             lambda a=a, b=b: worked_relation_residual(self.table, WorkedRelation.GENUS0, a, b))
            for a, b in genus0
        ]
        cases += [
            ("genus1_one_point", 1, lambda: worked_relation_residual(self.table, WorkedRelation.GENUS1_ONE_POINT)),
            ("genus1_two_point_x", 2, lambda: worked_relation_residual(
                self.table, WorkedRelation.GENUS1_TWO_POINT, spectator=Side.X)),
            ("genus1_two_point_y", 2, lambda: worked_relation_residual(
                self.table, WorkedRelation.GENUS1_TWO_POINT, spectator=Side.Y)),
            ("genus2_one_point", 3, lambda: worked_relation_residual(self.table, WorkedRelation.GENUS2_ONE_POINT)),
        ]
        for name, chi, fn in cases:
            if chi <= self.chi:
                self._record(f"worked_relation_{name}", None, fn)

    def _wk_identities(self):
        """Gêneros até o maior g com omega^(g)_{1,0} dentro de chi"""
        g_max = max(1, (self.chi + 1) // 2)
        self._record("wk_identities", None, lambda: wk_identities(g_max, executor=self.executor))
        self.report.records[-1].details.setdefault("g_max", g_max)

    def run(self) -> VerificationReport:
        run_id = str(uuid.uuid4())
        with logger.execution_context(run_id, "verification_suite", curve=self.spec.name, chi=self.chi):
            labels = mixed_labels(self.chi)
            with logger.stage_context(run_id, "entries", labels=len(labels)):
                for g, m, n in labels:
                    self._entry_checks(g, m, n)
            with logger.stage_context(run_id, "steps"):
                for g, m, n in labels:
                    if m >= 1 and is_stable(g, m - 1, n + 1):
                        self._step_checks(g, m - 1, n)
            with logger.stage_context(run_id, "worked_relations"):
                self._worked_relations()
            with logger.stage_context(run_id, "pole_splitting"):
                self._pole_splitting()
            self._record("shift_invariance", (0, 0, 3),
                         lambda: shift_invariance_residual(self.spec, 1, 0, 0, 3, Method.SIMPLE, self.executor))
            if _is_airy(self.spec):
                self._wk_identities()
        logger.log_check("verification_suite", self.report.passed, curve=self.spec.name,
                         failing=self.report.failing() or None)
        return self.report
