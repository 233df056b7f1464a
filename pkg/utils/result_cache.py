"""
Cache em disco de resultados (ResultEnvelope).

Um arquivo por entrada e fórmula, sob um diretório por curva. A escrita é
atômica (arquivo temporário no mesmo diretório + os.replace); a leitura
confere digest da curva, versão do motor, convenções e digest do corpo.
"""
import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from pydantic import ValidationError

from config.settings import EngineConfig, Formula
from core.models import CorrDiff, ResultEnvelope
from utils.logger import get_logger


logger = get_logger("result_cache")

Label = Tuple[int, int, int]


def write_atomic(path: Path, text: str):
    """Grava text em path sem deixar arquivo parcial visível"""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_json(payload: Any) -> str:
    """Saída determinística: chaves ordenadas, indentação fixa, newline final"""
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


class ResultCache:
    """Cache de CorrDiff por (curva, rótulo, fórmula)"""

    def __init__(self, cache_dir: Optional[str] = None, seed: int = EngineConfig.PROBE_SEED):
        self.root = Path(cache_dir or EngineConfig.CACHE_DIR)
        self.seed = seed
        self.hits = 0
        self.computed = 0
        self.rejected = 0
        self._lock = threading.Lock()

    def directory(self, curve_hash: str) -> Path:
        return self.root / curve_hash[:16]

    def path(self, curve_hash: str, label: Label, formula: Formula) -> Path:
        g, m, n = label
        return self.directory(curve_hash) / f"omega_g{g}_m{m}_n{n}.{Formula(formula).value}.json"

    def load(self, curve_hash: str, label: Label, formula: Formula) -> Optional[CorrDiff]:
        path = self.path(curve_hash, label, formula)
        if not path.exists():
            return None
        try:
            envelope = ResultEnvelope.model_validate_json(path.read_text(encoding="utf-8"))
        except (ValidationError, ValueError) as e:
            self._reject(path, label, "unreadable", error=str(e)[:200])
            return None
        if not envelope.matches(curve_hash):
            self._reject(path, label, "stale")
            return None
        if not envelope.intact():
            self._reject(path, label, "digest_mismatch")
            return None
        with self._lock:
            self.hits += 1
        logger.debug("cache_hit", label=list(label), formula=Formula(formula).value)
        return envelope.to_corrdiff()

    def _reject(self, path: Path, label: Label, reason: str, **details: Any):
        with self._lock:
            self.rejected += 1
        logger.warning("cache_entry_rejected", path=str(path), label=list(label), reason=reason, **details)

    def store(self, cd: CorrDiff, curve_hash: str, curve_name: str, formula: Optional[Formula] = None) -> Path:
        envelope = ResultEnvelope.from_corrdiff(cd, curve_hash, curve_name, seed=self.seed)
        path = self.path(curve_hash, cd.label, formula or cd.formula)
        write_atomic(path, render_json(envelope.model_dump(mode="json")))
        return path

    def cached(self, curve_hash: str, curve_name: str, label: Label, formula: Formula,
               compute: Callable[[], CorrDiff]) -> CorrDiff:
        """Lê do cache ou calcula e grava; entradas de outra fórmula não são gravadas aqui"""
        hit = self.load(curve_hash, label, formula)
        if hit is not None:
            return hit
        cd = compute()
        if cd.formula is Formula(formula):
            with self._lock:
                self.computed += 1
            self.store(cd, curve_hash, curve_name)
        return cd

    def wrap(self, producer: Callable, curve_hash: str, curve_name: str, formula: Formula) -> Callable:
        """Produtor de OmegaTable que passa pelo cache"""

        def produce(table, g: int, m: int, n: int) -> CorrDiff:
            return self.cached(curve_hash, curve_name, (g, m, n), formula,
                               lambda: producer(table, g, m, n))

        return produce

    def write_artifact(self, curve_hash: str, name: str, payload: Dict[str, Any]) -> Path:
        path = self.directory(curve_hash) / name
        write_atomic(path, render_json(payload))
        return path

    def stats(self) -> Dict[str, int]:
        return {"hits": self.hits, "computed": self.computed, "rejected": self.rejected}
