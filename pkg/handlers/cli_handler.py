"""
CLI Handler - carrega a curva, roda o comando e grava os resultados.

Cada comando devolve (payload, exit_code), no mesmo formato que o handler
de requisições devolvia (response, status_code).
"""
import time
import traceback
import uuid
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

from pydantic import ValidationError

from config.settings import (
    CONVENTIONS,
    ENGINE_VERSION,
    Command,
    CurveFamily,
    EngineConfig,
    Formula,
    Method,
    OutputFormat,
    Side,
)
from core.classical_tr import classical_producer, stable_labels
from core.errors import EngineError, ExitCode, PreconditionError, VerificationFailure
from core.exact_algebra import format_rational, mrat_equal
from core.graph_sums import graph_sum_swap
from core.models import CorrDiff, CurveFile, OmegaTable, PsiTable, RunConfig
from core.special_curves import closed_yz_table, curve_family, psi_extract
from core.spectral_curve import CurveSpec, SpectralCurve
from core.term_executor import TermExecutor
from core.xy_swap_engine import mixed_producer
from handlers.verification_suite import VerificationSuite
from utils.logger import get_logger
from utils.result_cache import ResultCache, render_json


logger = get_logger("cli_handler")

METHOD_FORMULA = {
    Method.SIMPLE: Formula.SIMPLE_RECURSION,
    Method.STANDARD: Formula.STANDARD_RECURSION,
    Method.GRAPH: Formula.GRAPH_SUM,
}


def resolve_curve_path(name: str) -> Path:
    """Caminho explícito, ou nome de uma curva em EngineConfig.CURVES_DIR"""
    path = Path(name)
    if path.exists():
        return path
    bundled = Path(EngineConfig.CURVES_DIR) / (name if name.endswith(".json") else f"{name}.json")
    if bundled.exists():
        return bundled
    raise PreconditionError(f"curve file not found: {name}", curve=name)


def load_curve_file(name: str) -> CurveFile:
    path = resolve_curve_path(name)
    try:
        return CurveFile.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        errors = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
        raise PreconditionError(f"invalid curve file {path}: {'; '.join(errors)}", curve=str(path))


def format_label(g: int, m: int, n: int) -> str:
    return f"omega^({g})_{{{m},{n}}}"


class CLIHandler:
    """Handler dos comandos tr, swap, mixed, closed-yz, psi e verify"""

    def __init__(self):
        self.logger = logger
        self._commands: Dict[Command, Callable[[RunConfig, "_Session"], Dict[str, Any]]] = {
            Command.TR: self._cmd_tr,
            Command.SWAP: self._cmd_swap,
            Command.MIXED: self._cmd_mixed,
            Command.CLOSED_YZ: self._cmd_closed_yz,
            Command.PSI: self._cmd_psi,
            Command.VERIFY: self._cmd_verify,
        }

    def run(self, config: RunConfig) -> Tuple[Dict[str, Any], int]:
        """
        Executa um comando.

        Returns:
            Tupla (payload, exit_code)
        """
        execution_id = str(uuid.uuid4())
        start_time = time.time()
        try:
            with self.logger.execution_context(execution_id, f"cmd_{config.command.value.replace('-', '_')}",
                                               curve=config.curve or (config.family.value if config.family else None)):
                session = _Session(config)
                payload = self._commands[config.command](config, session)
            payload.update({
                "command": config.command.value,
                "execution_id": execution_id,
                "engine_version": ENGINE_VERSION,
                "seed": config.seed,
                "cache": session.cache.stats(),
                "duration_seconds": round(time.time() - start_time, 3),
            })
            exit_code = ExitCode.OK if payload.get("passed", True) else ExitCode.VERIFICATION
            return payload, exit_code

        except EngineError as e:
            payload = e.to_dict()
            payload.update({"command": config.command.value, "execution_id": execution_id})
            if isinstance(e, VerificationFailure):
                payload["check"] = e.check
            return payload, e.exit_code

        except Exception as e:
            self.logger.error(
                "handler_exception",
                execution_id=execution_id,
                error=str(e),
                error_type=type(e).__name__,
                traceback=traceback.format_exc(),
            )
            return {
                "command": config.command.value,
                "execution_id": execution_id,
                "error": "Internal error",
                "message": str(e),
                "error_type": type(e).__name__,
            }, ExitCode.INTERNAL

    # ------------------------------------------------------------------
    # Comandos
    # ------------------------------------------------------------------

    def _cmd_tr(self, config: RunConfig, session: "_Session") -> Dict[str, Any]:
        table = session.base_table()
        files, results = [], []
        for g, m, _ in stable_labels(config.chi):
            cd = table.entry(g, m, 0)
            files.append(session.file(cd.label, Formula.CLASSICAL_TR))
            results.append(cd)
        return session.payload(files, results, chi=config.chi)

    def _cmd_swap(self, config: RunConfig, session: "_Session") -> Dict[str, Any]:
        """omega^(g)_{0,n} pela soma universal de grafos"""
        config.require("g", "n")
        base = session.base_table()
        cd = session.cache.cached(session.curve_hash, session.spec.name, (config.g, 0, config.n),
                                  Formula.GRAPH_SUM,
                                  lambda: graph_sum_swap(base, config.g, config.n, session.executor))
        return session.payload([session.file(cd.label, Formula.GRAPH_SUM)], [cd])

    def _cmd_mixed(self, config: RunConfig, session: "_Session") -> Dict[str, Any]:
        config.require("g", "m", "n")
        label = (config.g, config.m, config.n)
        methods = [Method.SIMPLE, Method.STANDARD] if config.method is Method.BOTH else [config.method]
        results: List[CorrDiff] = []
        files: List[str] = []
        for method in methods:
            table = session.mixed_table(method)
            cd = table.entry(*label)
            results.append(cd)
            formula = Formula.CLASSICAL_TR if config.n == 0 else METHOD_FORMULA[method]
            files.append(session.file(label, formula))
        payload = session.payload(files, results, method=config.method.value)
        if len(results) == 2:
            equal = mrat_equal(results[0].body, results[1].body)
            self.logger.log_check("recursion_equivalence", equal, label=list(label))
            if not equal:
                raise VerificationFailure(
                    f"simple and standard recursions disagree at (g,m,n)={label}",
                    check="recursion_equivalence", label=list(label),
                )
            payload["attestation"] = {
                "check": "recursion_equivalence",
                "passed": True,
                "formulas": [cd.formula.value for cd in results],
            }
        return payload

    def _cmd_closed_yz(self, config: RunConfig, session: "_Session") -> Dict[str, Any]:
        config.require("g", "m")
        table = session.closed_table()
        cd = table.entry(config.g, config.m, 0)
        return session.payload([session.file(cd.label, Formula.CLOSED_YZ)], [cd])

    def _cmd_psi(self, config: RunConfig, session: "_Session") -> Dict[str, Any]:
        config.require("g")
        m = config.m or 1
        psi = psi_extract(session.closed_table(), config.g, m)
        record = {
            "psi": psi.to_dict(),
            "m": m,
            "curve_hash": session.curve_hash,
            "engine_version": ENGINE_VERSION,
            "conventions": CONVENTIONS.to_dict(),
            "formula": Formula.CLOSED_YZ.value,
            "seed": config.seed,
        }
        path = session.cache.write_artifact(session.curve_hash, f"psi_g{config.g}_m{m}.json", record)
        return {"curve": session.spec.name, "files": [str(path)], "psi": psi.to_dict(),
                "pretty": _format_psi(psi)}

    def _cmd_verify(self, config: RunConfig, session: "_Session") -> Dict[str, Any]:
        report = VerificationSuite(session.spec, config.chi, config.seed, session.executor,
                                   base=session.base_table(sides=(Side.X, Side.Y))).run()
        payload = report.to_dict()
        path = session.cache.write_artifact(session.curve_hash, f"verify_chi{config.chi}.json", payload)
        payload["files"] = [str(path)]
        return payload


class _Session:
    """Curva, cache e executor de uma execução"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.spec = self._load_spec(config)
        self.curve_hash = CurveFile.from_spec(self.spec).digest()
        self.cache = ResultCache(config.cache_dir, config.seed)
        self.executor = TermExecutor(config.max_workers)
        self._base = None

    @staticmethod
    def _load_spec(config: RunConfig) -> CurveSpec:
        if config.curve and config.family:
            raise PreconditionError("use either --curve or --family")
        if config.curve:
            return load_curve_file(config.curve).to_spec()
        if config.family:
            return curve_family(config.family, r=config.r, epsilon=config.epsilon, lam=config.lam)
        if config.command in (Command.CLOSED_YZ, Command.PSI):
            return curve_family(CurveFamily.AIRY)
        raise PreconditionError(f"command {config.command.value} needs --curve")

    def base_table(self, sides=(Side.X,)) -> OmegaTable:
        """Coluna n = 0 pela recursão clássica, passando pelo cache"""
        if self._base is None:
            curve = SpectralCurve(self.spec, sides)
            producer = self.cache.wrap(classical_producer(self.executor), self.curve_hash,
                                       self.spec.name, Formula.CLASSICAL_TR)
            self._base = OmegaTable(curve, producer)
        return self._base

    def mixed_table(self, method: Method) -> OmegaTable:
        base = self.base_table()
        inner = OmegaTable(base.curve)
        inner.producer = self.cache.wrap(mixed_producer(base, method, self.executor), self.curve_hash,
                                         self.spec.name, METHOD_FORMULA[Method(method)])
        return inner

    def closed_table(self) -> OmegaTable:
        table = closed_yz_table(self.spec, self.executor, self.config.hbar_cutoff)
        table.producer = self.cache.wrap(table.producer, self.curve_hash, self.spec.name, Formula.CLOSED_YZ)
        return table

    def file(self, label, formula: Formula) -> str:
        return str(self.cache.path(self.curve_hash, label, formula))

    def payload(self, files: List[str], results: List[CorrDiff], **extra: Any) -> Dict[str, Any]:
        return {
            "curve": self.spec.name,
            "curve_hash": self.curve_hash,
            "files": files,
            "results": [cd.to_dict() for cd in results],
            **extra,
        }


def _format_psi(psi: PsiTable) -> List[str]:
    lines = []
    for ks, value in sorted(psi.entries.items()):
        taus = " ".join(f"tau_{k}" for k in ks)
        lines.append(f"<{taus}>_{psi.g} = {format_rational(value)}")
    return lines


def render(payload: Dict[str, Any], output_format: OutputFormat) -> str:
    """Texto impresso pela CLI: JSON determinístico ou um resumo legível"""
    if OutputFormat(output_format) is OutputFormat.JSON:
        return render_json(payload)
    lines = []
    if "error" in payload:
        lines.append(f"error: {payload['error']}")
        for key, value in sorted(payload.get("details", {}).items()):
            lines.append(f"  {key}: {value}")
        return "\n".join(lines) + "\n"
    for result in payload.get("results", []):
        lines.append(f"{format_label(result['g'], result['m'], result['n'])} = {result['text']}"
                     f"    [{result['formula']}]")
    lines.extend(payload.get("pretty", []))
    if "attestation" in payload:
        lines.append(f"{payload['attestation']['check']}: passed")
    if "checks" in payload:
        for record in payload["checks"]:
            label = f" {tuple(record['label'])}" if "label" in record else ""
            lines.append(f"{'ok  ' if record['passed'] else 'FAIL'} {record['check']}{label}")
        lines.append("passed" if payload["passed"] else f"failed: {', '.join(payload['failing'])}")
    for path in payload.get("files", []):
        lines.append(f"-> {path}")
    if "cache" in payload:
        stats = payload["cache"]
        lines.append(f"cache: {stats['hits']} hits, {stats['computed']} computed, {stats['rejected']} rejected")
    return "\n".join(lines) + "\n"
